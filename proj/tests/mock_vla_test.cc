// Copyright 2026 The vlafreeze Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vlafreeze/mock_vla.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "test_support.h"
#include "vlafreeze/error.h"
#include "vlafreeze/rng.h"
#include "vlafreeze/scene.h"

namespace vlafreeze {
namespace {

using testing::RelativeError;

// Straight-line forward pass written from the documented equations, reading
// only the public parameter views.
std::vector<double> OracleForward(const MockVla& m, std::span<const double> x,
                                  std::span<const int> tokens) {
  const auto& o = m.options();
  const int P = o.patch_size;
  const Shape& s = o.input_shape;
  const int D = o.embedding_dim, R = o.prompt_rank, F = m.feature_dim();
  const int cols = s.width / P;

  std::vector<double> f(F, 0.0);
  for (int r = 0; r < s.height; ++r)
    for (int c = 0; c < s.width; ++c)
      for (int ch = 0; ch < s.channels; ++ch) {
        const int i = (r * s.width + c) * s.channels + ch;
        const int slot = ((r / P) * cols + c / P) * s.channels + ch;
        f[slot] += m.pixel_weight()[i] * (x[i] - 0.5) / (P * P);
      }

  std::vector<double> u(D);
  for (int d = 0; d < D; ++d) {
    u[d] = m.image_bias()[d];
    for (int j = 0; j < F; ++j) u[d] += m.image_projection()[d * F + j] * f[j];
  }

  const auto E = m.embedding_table();
  std::vector<double> score(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    score[t] = 0;
    for (int d = 0; d < D; ++d) score[t] += E[tokens[t] * D + d] * m.attention_key()[d];
  }
  double mx = score[0];
  for (double v : score) mx = std::max(mx, v);
  double z = 0;
  for (double& v : score) z += (v = std::exp(v - mx));
  std::vector<double> q(D, 0.0);
  for (std::size_t t = 0; t < tokens.size(); ++t)
    for (int d = 0; d < D; ++d) q[d] += score[t] / z * E[tokens[t] * D + d];

  double ms = 0;
  for (double v : q) ms += v * v / D;
  const double rms = std::sqrt(ms + 1e-12);
  std::vector<double> lat(R, 0.0);
  for (int r = 0; r < R; ++r)
    for (int d = 0; d < D; ++d) lat[r] += m.latent_down()[r * D + d] * q[d] / rms;

  std::vector<double> h(D);
  for (int d = 0; d < D; ++d) {
    double g = 1.0;
    for (int r = 0; r < R; ++r) g += m.latent_up()[d * R + r] * lat[r];
    h[d] = u[d] * g;
  }
  const int A = MockVla::kActionVocabulary;
  std::vector<double> logits(A);
  for (int a = 0; a < A; ++a) {
    logits[a] = m.output_bias()[a];
    for (int d = 0; d < D; ++d) logits[a] += m.output_projection()[a * D + d] * h[d];
  }
  mx = *std::max_element(logits.begin(), logits.end());
  z = 0;
  for (double& v : logits) z += (v = std::exp(v - mx));
  for (double& v : logits) v /= z;
  return logits;
}

double OracleLoss(const MockVla& m, std::span<const double> x,
                  std::span<const int> tokens) {
  return -std::log(OracleForward(m, x, tokens)[MockVla::kFreezeToken]);
}

TEST(MockVlaTest, ForwardMatchesStraightLineOracle) {
  for (std::uint64_t seed : {0u, 1u, 5u}) {
    const MockVla m(MockVlaOptions{.seed = seed});
    const Prompt p = m.MakePrompt(DefaultTemplate(), "put the bowl on the plate");
    const Image img = SyntheticScene(m.options().input_shape, seed + 10);
    const ActionDistribution d = m.Forward(img, p);
    const auto expected = OracleForward(m, img.pixels(), p.tokens());
    for (int a = 0; a < MockVla::kActionVocabulary; ++a) {
      EXPECT_NEAR(d[a], expected[a], 1e-13);
    }
  }
}

// The documented draw order reproduces every parameter bit for bit.
TEST(MockVlaTest, ParametersFollowDocumentedDrawOrder) {
  const MockVlaOptions o{.seed = 42};
  const MockVla m(o);
  const std::size_t D = o.embedding_dim, R = o.prompt_rank, F = m.feature_dim();
  const std::size_t V = m.tokenizer().vocabulary_size(), A = MockVla::kActionVocabulary;
  Rng rng(o.seed);
  auto draw = [&](std::size_t n, double scale) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.Normal() * scale;
    return v;
  };
  auto same = [](const std::vector<double>& a, std::span<const double> b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  };
  EXPECT_TRUE(same(draw(V * D, o.embedding_scale), m.embedding_table()));
  EXPECT_TRUE(same(draw(D, 1 / std::sqrt(D)), m.attention_key()));
  EXPECT_TRUE(same(draw(D * F, o.image_gain / std::sqrt(F)), m.image_projection()));
  EXPECT_TRUE(same(draw(D, 1.0), m.image_bias()));
  EXPECT_TRUE(same(draw(D * R, o.prompt_gain / std::sqrt(R)), m.latent_up()));
  EXPECT_TRUE(same(draw(R * D, 1 / std::sqrt(D)), m.latent_down()));
  EXPECT_TRUE(same(draw(A * D, o.output_scale / std::sqrt(D)), m.output_projection()));
  auto bias = draw(A, 1.0);
  bias[MockVla::kFreezeToken] += o.freeze_bias;
  EXPECT_TRUE(same(bias, m.output_bias()));
  // Mask: +-1 draws, then centered per patch and channel.
  const Shape& s = o.input_shape;
  std::vector<double> mask(s.size());
  for (double& v : mask) v = rng.Below(2) == 0 ? -1.0 : 1.0;
  std::vector<double> mean(F, 0.0);
  const int P = o.patch_size, cols = s.width / P;
  auto slot = [&](std::size_t i) {
    const std::size_t ch = i % s.channels, c = (i / s.channels) % s.width,
                      r = i / s.channels / s.width;
    return ((r / P) * cols + c / P) * s.channels + ch;
  };
  for (std::size_t i = 0; i < mask.size(); ++i) mean[slot(i)] += mask[i] / (P * P);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] -= mean[slot(i)];
  for (std::size_t i = 0; i < mask.size(); ++i) {
    ASSERT_NEAR(mask[i], m.pixel_weight()[i], 1e-15) << i;
  }
}

// Centering makes every flat patch contribute nothing.
TEST(MockVlaTest, FlatImagesGiveBiasOnlyImageCode) {
  const MockVla m;
  const Prompt p = m.MakePrompt(DefaultTemplate(), "open the drawer");
  const auto a = m.Forward(Image::Filled(m.options().input_shape, 0.2), p);
  const auto b = m.Forward(Image::Filled(m.options().input_shape, 0.9), p);
  for (int i = 0; i < MockVla::kActionVocabulary; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(MockVlaTest, ValidatesOptionsShapesAndTokens) {
  EXPECT_THROW(MockVla(MockVlaOptions{.patch_size = 5}), Error);
  EXPECT_THROW(MockVla(MockVlaOptions{.prompt_rank = 0}), Error);
  const MockVla m;
  const Prompt p = m.MakePrompt(DefaultTemplate(), "go");
  EXPECT_THROW(m.Forward(Image::Filled({16, 16, 3}, 0.5), p), Error);
  const std::vector<int> bad = {-1};
  EXPECT_THROW(m.Embed(bad), Error);
  EXPECT_TRUE(m.deterministic());
}

TEST(MockVlaTest, CleanScenesRarelyFreeze) {
  const MockVla m;
  const Prompt p = m.MakePrompt(DefaultTemplate(), "pick up the black bowl");
  int frozen = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    frozen += m.Forward(SyntheticScene(m.options().input_shape, s), p).Argmax() ==
              MockVla::kFreezeToken;
  }
  EXPECT_EQ(frozen, 0);
}

TEST(MockVlaTest, ImageGradientMatchesCentralDifferences) {
  const MockVla m(MockVlaOptions{.seed = 3});
  const FreezeSpec spec = MockVla::DefaultFreezeSpec();
  Rng rng(99);
  for (int point = 0; point < 3; ++point) {
    const Image img = SyntheticScene(m.options().input_shape, 50 + point);
    const Prompt p = m.MakePrompt(DefaultTemplate(), "put the mug in the basket");
    const LossEvaluation ev = m.Evaluate(img, p, spec, kImageGradient);
    EXPECT_NEAR(ev.loss, OracleLoss(m, img.pixels(), p.tokens()), 1e-10);
    ASSERT_EQ(ev.image_gradient.size(), img.size());
    for (int k = 0; k < 20; ++k) {
      const std::size_t i = rng.Below(img.size());
      std::vector<double> x(img.pixels().begin(), img.pixels().end());
      const double h = 1e-5;
      x[i] += h;
      const double up = OracleLoss(m, x, p.tokens());
      x[i] -= 2 * h;
      const double down = OracleLoss(m, x, p.tokens());
      EXPECT_LT(RelativeError(ev.image_gradient[i], (up - down) / (2 * h), 1e-8), 1e-4)
          << "pixel " << i;
    }
  }
}

TEST(MockVlaTest, EmbeddingGradientMatchesCentralDifferences) {
  const MockVla m(MockVlaOptions{.seed = 4});
  const FreezeSpec spec = MockVla::DefaultFreezeSpec();
  const Image img = SyntheticScene(m.options().input_shape, 8);
  const Prompt p = m.MakePrompt(DefaultTemplate(), "turn on the stove");
  const LossEvaluation ev = m.Evaluate(img, p, spec, kEmbeddingGradient);
  std::vector<double> e = m.Embed(p.tokens());
  ASSERT_EQ(ev.embedding_gradient.size(), e.size());
  auto loss = [&](const std::vector<double>& emb) {
    return -std::log(m.ForwardEmbedded(img.pixels(), emb)[MockVla::kFreezeToken]);
  };
  Rng rng(5);
  for (int k = 0; k < 40; ++k) {
    const std::size_t i = rng.Below(e.size());
    const double h = 1e-6, keep = e[i];
    e[i] = keep + h;
    const double up = loss(e);
    e[i] = keep - h;
    const double down = loss(e);
    e[i] = keep;
    EXPECT_LT(RelativeError(ev.embedding_gradient[i], (up - down) / (2 * h), 1e-8), 1e-3)
        << "coordinate " << i;
  }
}

// Gradients requested separately equal those requested together.
TEST(MockVlaTest, GradientPartsAreIndependent) {
  const MockVla m;
  const FreezeSpec spec = MockVla::DefaultFreezeSpec();
  const Image img = SyntheticScene(m.options().input_shape, 2);
  const Prompt p = m.MakePrompt(DefaultTemplate(), "close the microwave");
  const auto all = m.Evaluate(img, p, spec, kAllGradients);
  EXPECT_EQ(all.image_gradient, m.Evaluate(img, p, spec, kImageGradient).image_gradient);
  EXPECT_EQ(all.embedding_gradient,
            m.Evaluate(img, p, spec, kEmbeddingGradient).embedding_gradient);
  const auto none = m.Evaluate(img, p, spec, kNoGradient);
  EXPECT_TRUE(none.image_gradient.empty());
  EXPECT_TRUE(none.embedding_gradient.empty());
  EXPECT_EQ(none.loss, all.loss);
}

// A multi-token freeze set uses the log-sum-exp form of the gradient.
TEST(MockVlaTest, FreezeSetGradientMatchesDifferences) {
  const MockVla m(MockVlaOptions{.seed = 6});
  const FreezeSpec spec({0, 5, 9});
  const Image img = SyntheticScene(m.options().input_shape, 3);
  const Prompt p = m.MakePrompt(DefaultTemplate(), "stack the blocks");
  const auto ev = m.Evaluate(img, p, spec, kImageGradient);
  auto loss = [&](const std::vector<double>& x) {
    const auto pr = OracleForward(m, x, p.tokens());
    return -std::log(pr[0] + pr[5] + pr[9]);
  };
  std::vector<double> x(img.pixels().begin(), img.pixels().end());
  for (std::size_t i : {0u, 100u, 777u, 2000u}) {
    const double keep = x[i];
    x[i] = keep + 1e-5;
    const double up = loss(x);
    x[i] = keep - 1e-5;
    const double down = loss(x);
    x[i] = keep;
    EXPECT_LT(RelativeError(ev.image_gradient[i], (up - down) / 2e-5, 1e-8), 1e-4);
  }
}

}  // namespace
}  // namespace vlafreeze
