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

#include "vlafreeze/outer_min.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_support.h"
#include "vlafreeze/mock_vla.h"
#include "vlafreeze/rng.h"
#include "vlafreeze/scene.h"

namespace vlafreeze {
namespace {

using testing::LogisticAdapter;

constexpr Shape kTiny{2, 2, 1};

TEST(SignStepTest, MovesAgainstGradientAndLeavesZerosAlone) {
  const AdversarialImage adv(Image(kTiny, {0.5, 0.5, 0.5, 0.5}), 0.1);
  const std::vector<double> g = {2.0, -3.0, 0.0, -0.0};
  const AdversarialImage next = SignStep(adv, g, 0.04);
  const auto px = next.current().pixels();
  EXPECT_DOUBLE_EQ(px[0], 0.46);
  EXPECT_DOUBLE_EQ(px[1], 0.54);
  EXPECT_EQ(px[2], 0.5);
  EXPECT_EQ(px[3], 0.5);
  EXPECT_EQ(next.base(), adv.base());
}

TEST(SignStepTest, ClipsToBallAndUnitRange) {
  const AdversarialImage adv(Image(kTiny, {0.0, 1.0, 0.5, 0.5}), 0.05);
  AdversarialImage cur = adv;
  for (int k = 0; k < 10; ++k) {
    cur = SignStep(cur, std::vector<double>{1.0, -1.0, 1.0, -1.0}, 0.02);
  }
  const auto px = cur.current().pixels();
  EXPECT_EQ(px[0], 0.0);
  EXPECT_EQ(px[1], 1.0);
  EXPECT_NEAR(px[2], 0.45, 1e-15);
  EXPECT_NEAR(px[3], 0.55, 1e-15);
}

TEST(SignStepTest, RejectsBadInputs) {
  const AdversarialImage adv(Image::Filled(kTiny, 0.5), 0.1);
  auto code_of = [&](std::vector<double> g, double alpha) {
    try {
      SignStep(adv, g, alpha);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;  // sentinel: no throw
  };
  EXPECT_EQ(code_of({1, 1, 1}, 0.1), ErrorCode::kDimension);
  EXPECT_EQ(code_of({1, 1, 1, 1}, 0.0), ErrorCode::kValidation);
  EXPECT_EQ(code_of({1, std::numeric_limits<double>::quiet_NaN(), 1, 1}, 0.1),
            ErrorCode::kNumerical);
  EXPECT_EQ(code_of({1, 1, std::numeric_limits<double>::infinity(), 1}, 0.1),
            ErrorCode::kNumerical);
}

TEST(SignStepTest, NonFiniteMessageNamesCoordinate) {
  const AdversarialImage adv(Image::Filled(kTiny, 0.5), 0.1);
  try {
    SignStep(adv, std::vector<double>{0, 0, std::nan(""), 0}, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("coordinate 2"), std::string::npos);
  }
}

// Oracle: the sign step followed by per-coordinate clipping, written out.
TEST(SignStepTest, PropertyMatchesCoordinatewiseOracle) {
  Rng rng(42);
  const Shape shape{4, 5, 3};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> base(shape.size()), cur(shape.size()), g(shape.size());
    const double eps = rng.Uniform(0.0, 0.1);
    for (std::size_t i = 0; i < base.size(); ++i) {
      base[i] = rng.Uniform();
      cur[i] = std::clamp(base[i] + rng.Uniform(-eps, eps), 0.0, 1.0);
      g[i] = rng.Below(4) == 0 ? 0.0 : rng.Normal();
    }
    const double alpha = rng.Uniform(0.001, 0.05);
    const AdversarialImage adv(Image(shape, base), Image(shape, cur), eps);
    const AdversarialImage next = SignStep(adv, g, alpha);
    const auto out = next.current().pixels();
    for (std::size_t i = 0; i < base.size(); ++i) {
      const double s = g[i] > 0 ? 1.0 : (g[i] < 0 ? -1.0 : 0.0);
      double want = cur[i] - alpha * s;
      want = std::min(std::max(want, base[i] - eps), base[i] + eps);
      want = std::min(std::max(want, 0.0), 1.0);
      EXPECT_DOUBLE_EQ(out[i], want);
      EXPECT_LE(std::abs(out[i] - base[i]), eps + kBallTolerance);
    }
  }
}

TEST(AggregateGradientTest, IsSumOfPerPromptGradients) {
  MockVla model(MockVlaOptions{.seed = 2});
  const AdversarialImage adv(SyntheticScene({32, 32, 3}, 4), 4.0 / 255);
  const FreezeSpec spec = MockVla::DefaultFreezeSpec();
  std::vector<Prompt> prompts = {
      model.MakePrompt(DefaultTemplate(), "open the drawer"),
      model.MakePrompt(DefaultTemplate(), "pick up the red mug"),
      model.MakePrompt(DefaultTemplate(), "put the bowl on the stove")};
  std::vector<double> want(adv.current().size(), 0.0);
  for (const auto& p : prompts) {
    const auto g = ImageGradient(model, adv.current(), p, spec);
    for (std::size_t i = 0; i < g.size(); ++i) want[i] += g[i];
  }
  const auto got1 = AggregateGradient(model, adv, prompts, spec, 1);
  const auto got3 = AggregateGradient(model, adv, prompts, spec, 3);
  ASSERT_EQ(got1.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_NEAR(got1[i], want[i], 1e-12 * (1 + std::abs(want[i])));
  }
  EXPECT_EQ(got1, got3);
}

TEST(AggregateGradientTest, EmptyPromptsAreRejected) {
  LogisticAdapter stub(kTiny, {1, 1, 1, 1}, 0);
  const AdversarialImage adv(Image::Filled(kTiny, 0.5), 0.1);
  EXPECT_THROW(AggregateGradient(stub, adv, {}, FreezeSpec({0})), Error);
}

// With a logistic model every gradient coordinate has the sign of -w, so each
// step moves pixel i by +alpha * sign(w_i) until the ball clips it.
TEST(MinimizeImageTest, LogisticStubFollowsAnalyticPath) {
  const std::vector<double> w = {1.0, -2.0, 0.0, 0.5};
  LogisticAdapter stub(kTiny, w, -1.0);
  const FreezeSpec spec({0});
  const AdversarialImage adv(Image::Filled(kTiny, 0.5), 0.05);
  const std::vector<Prompt> prompts = {
      stub.MakePrompt(DefaultTemplate(), "open the drawer")};
  const MinimizeResult r = MinimizeImage(stub, adv, prompts, 5, 0.02, spec);
  ASSERT_EQ(r.traces.size(), 5u);
  const auto px = r.image.current().pixels();
  EXPECT_NEAR(px[0], 0.55, 1e-15);
  EXPECT_NEAR(px[1], 0.45, 1e-15);
  EXPECT_EQ(px[2], 0.5);
  EXPECT_NEAR(px[3], 0.55, 1e-15);

  // Loss decreases monotonically while the ball is not yet binding.
  for (std::size_t k = 0; k < r.traces.size(); ++k) {
    const auto& t = r.traces[k];
    EXPECT_EQ(t.step, static_cast<int>(k));
    EXPECT_LE(t.loss_after, t.loss_before);
    ASSERT_EQ(t.prompt_losses_after.size(), 1u);
    EXPECT_DOUBLE_EQ(t.loss_after, t.prompt_losses_after[0]);
    EXPECT_DOUBLE_EQ(std::exp(-t.loss_after), t.mean_freeze_probability_after);
    EXPECT_LE(t.linf_from_base, 0.05 + kBallTolerance);
    if (k > 0) {
      EXPECT_DOUBLE_EQ(t.loss_before, r.traces[k - 1].loss_after);
    }
  }
}

TEST(MinimizeImageTest, ZeroStepsIsIdentity) {
  LogisticAdapter stub(kTiny, {1, 1, 1, 1}, 0);
  const AdversarialImage adv(Image::Filled(kTiny, 0.5), 0.1);
  const auto r = MinimizeImage(stub, adv, {stub.MakePrompt(DefaultTemplate(), "go")},
                               0, 0.01, FreezeSpec({0}));
  EXPECT_EQ(r.image, adv);
  EXPECT_TRUE(r.traces.empty());
  EXPECT_THROW(MinimizeImage(stub, adv, {stub.MakePrompt(DefaultTemplate(), "go")},
                             -1, 0.01, FreezeSpec({0})),
               Error);
}

TEST(MinimizeImageTest, MockStaysInsideBudgetEveryStep) {
  MockVla model(MockVlaOptions{.seed = 1});
  const FreezeSpec spec = MockVla::DefaultFreezeSpec();
  const double eps = 8.0 / 255;
  AdversarialImage adv(SyntheticScene({32, 32, 3}, 3), eps);
  const std::vector<Prompt> prompts = {
      model.MakePrompt(DefaultTemplate(), "close the top drawer")};
  for (int k = 0; k < 15; ++k) {
    adv = MinimizeImage(model, adv, prompts, 1, 1.0 / 255, spec).image;
    EXPECT_LE(LinfDistance(adv.current(), adv.base()), eps + kBallTolerance);
    for (double v : adv.current().pixels()) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

}  // namespace
}  // namespace vlafreeze
