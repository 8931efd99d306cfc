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

#include <algorithm>
#include <cmath>

#include "vlafreeze/error.h"
#include "vlafreeze/rng.h"

namespace vlafreeze {

struct MockVla::Activations {
  std::vector<double> features;    // F
  std::vector<double> image_code;  // u, D
  std::vector<double> embeddings;  // T x D
  std::vector<double> attention;   // a, T
  std::vector<double> pooled;      // q, D
  std::vector<double> normalized;  // q / rms(q), D
  double rms = 1.0;
  std::vector<double> latent;      // z = V q, R
  std::vector<double> mixed;       // 1 + U z, D
  std::vector<double> hidden;      // h, D
  std::vector<double> logits;      // A
  std::vector<double> probabilities;
};

namespace {

constexpr double kRmsFloor = 1e-12;

void Softmax(std::span<const double> logits, std::vector<double>& out) {
  out.resize(logits.size());
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
}

void FillNormal(Rng& rng, std::vector<double>& values, std::size_t n,
                double scale) {
  values.resize(n);
  for (double& v : values) v = rng.Normal() * scale;
}

}  // namespace

MockVla::MockVla(MockVlaOptions options) : options_(options) {
  if (options_.patch_size <= 0 || options_.embedding_dim <= 0 ||
      options_.prompt_rank <= 0) {
    Fail(ErrorCode::kValidation,
         "mock-vla patch_size, embedding_dim and prompt_rank must be positive");
  }
  const Shape& shape = options_.input_shape;
  if (shape.height <= 0 || shape.width <= 0 || shape.channels <= 0 ||
      shape.height % options_.patch_size != 0 ||
      shape.width % options_.patch_size != 0) {
    Fail(ErrorCode::kValidation,
         "mock-vla input shape " + shape.ToString() +
             " must tile exactly into patches of " +
             std::to_string(options_.patch_size));
  }
  patches_per_col_ = shape.height / options_.patch_size;
  patches_per_row_ = shape.width / options_.patch_size;
  feature_dim_ = patches_per_col_ * patches_per_row_ * shape.channels;

  const auto dim = static_cast<std::size_t>(options_.embedding_dim);
  const auto features = static_cast<std::size_t>(feature_dim_);
  const auto vocab = static_cast<std::size_t>(tokenizer_.vocabulary_size());
  const auto actions = static_cast<std::size_t>(kActionVocabulary);
  const double inv_sqrt_dim = 1.0 / std::sqrt(static_cast<double>(dim));

  Rng rng(options_.seed);
  FillNormal(rng, embeddings_, vocab * dim, options_.embedding_scale);
  FillNormal(rng, key_, dim, inv_sqrt_dim);
  FillNormal(rng, projection_, dim * features,
             options_.image_gain / std::sqrt(static_cast<double>(features)));
  FillNormal(rng, projection_bias_, dim, 1.0);
  const auto rank = static_cast<std::size_t>(options_.prompt_rank);
  FillNormal(rng, latent_up_, dim * rank,
             options_.prompt_gain / std::sqrt(static_cast<double>(rank)));
  FillNormal(rng, latent_down_, rank * dim, inv_sqrt_dim);
  FillNormal(rng, output_, actions * dim, options_.output_scale * inv_sqrt_dim);
  FillNormal(rng, output_bias_, actions, 1.0);
  output_bias_[kFreezeToken] += options_.freeze_bias;
  pixel_weight_.resize(shape.size());
  for (double& v : pixel_weight_) v = rng.Below(2) == 0 ? -1.0 : 1.0;
  // Center the mask inside every patch and channel.
  std::vector<double> cell_mean(features, 0.0);
  for (std::size_t i = 0; i < pixel_weight_.size(); ++i) {
    cell_mean[FeatureOf(i)] += pixel_weight_[i];
  }
  const double area = static_cast<double>(options_.patch_size * options_.patch_size);
  for (std::size_t i = 0; i < pixel_weight_.size(); ++i) {
    pixel_weight_[i] -= cell_mean[FeatureOf(i)] / area;
  }
}

std::size_t MockVla::FeatureOf(std::size_t pixel) const {
  const Shape& shape = options_.input_shape;
  const auto channels = static_cast<std::size_t>(shape.channels);
  const auto width = static_cast<std::size_t>(shape.width);
  const auto patch = static_cast<std::size_t>(options_.patch_size);
  const std::size_t ch = pixel % channels;
  const std::size_t c = (pixel / channels) % width;
  const std::size_t r = pixel / channels / width;
  return ((r / patch) * static_cast<std::size_t>(patches_per_row_) + c / patch) *
             channels + ch;
}

void MockVla::CheckShape(const Shape& shape) const {
  if (shape != options_.input_shape) {
    Fail(ErrorCode::kDimension, "mock-vla expects images of shape " +
                                    options_.input_shape.ToString() +
                                    ", got " + shape.ToString());
  }
}

void MockVla::CheckTokens(std::span<const int> tokens) const {
  if (tokens.empty()) {
    Fail(ErrorCode::kTokenizer, "mock-vla needs at least one prompt token");
  }
  for (int id : tokens) {
    if (id < 0 || id >= tokenizer_.vocabulary_size()) {
      Fail(ErrorCode::kTokenizer, "token id " + std::to_string(id) +
                                      " outside mock-vla vocabulary");
    }
  }
}

std::vector<double> MockVla::Embed(std::span<const int> tokens) const {
  CheckTokens(tokens);
  const auto dim = static_cast<std::size_t>(options_.embedding_dim);
  std::vector<double> out(tokens.size() * dim);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    std::copy_n(embeddings_.begin() + static_cast<std::ptrdiff_t>(tokens[t] * dim),
                dim, out.begin() + static_cast<std::ptrdiff_t>(t * dim));
  }
  return out;
}

void MockVla::RunForward(std::span<const double> pixels,
                         std::span<const double> embeddings,
                         Activations& act) const {
  const Shape& shape = options_.input_shape;
  const int patch = options_.patch_size;
  const auto dim = static_cast<std::size_t>(options_.embedding_dim);
  const auto features = static_cast<std::size_t>(feature_dim_);
  if (pixels.size() != shape.size()) {
    Fail(ErrorCode::kDimension, "mock-vla pixel buffer has wrong size");
  }
  if (embeddings.empty() || embeddings.size() % dim != 0) {
    Fail(ErrorCode::kDimension, "mock-vla embedding buffer has wrong size");
  }
  const std::size_t tokens = embeddings.size() / dim;

  act.features.assign(features, 0.0);
  for (int r = 0; r < shape.height; ++r) {
    for (int c = 0; c < shape.width; ++c) {
      const std::size_t cell =
          static_cast<std::size_t>((r / patch) * patches_per_row_ + c / patch) *
          shape.channels;
      const std::size_t base =
          (static_cast<std::size_t>(r) * shape.width + c) * shape.channels;
      for (int ch = 0; ch < shape.channels; ++ch) {
        act.features[cell + ch] +=
            pixel_weight_[base + ch] * (pixels[base + ch] - 0.5);
      }
    }
  }
  const double inv_area = 1.0 / (patch * patch);
  for (double& f : act.features) f *= inv_area;

  act.image_code.assign(projection_bias_.begin(), projection_bias_.end());
  for (std::size_t d = 0; d < dim; ++d) {
    const double* row = projection_.data() + d * features;
    double acc = 0.0;
    for (std::size_t j = 0; j < features; ++j) acc += row[j] * act.features[j];
    act.image_code[d] += acc;
  }

  act.embeddings.assign(embeddings.begin(), embeddings.end());
  std::vector<double> scores(tokens);
  for (std::size_t t = 0; t < tokens; ++t) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) s += embeddings[t * dim + d] * key_[d];
    scores[t] = s;
  }
  Softmax(scores, act.attention);
  act.pooled.assign(dim, 0.0);
  for (std::size_t t = 0; t < tokens; ++t) {
    for (std::size_t d = 0; d < dim; ++d) {
      act.pooled[d] += act.attention[t] * embeddings[t * dim + d];
    }
  }

  double square_sum = 0.0;
  for (double v : act.pooled) square_sum += v * v;
  act.rms = std::sqrt(square_sum / static_cast<double>(dim) + kRmsFloor);
  act.normalized.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) act.normalized[d] = act.pooled[d] / act.rms;

  const auto rank = static_cast<std::size_t>(options_.prompt_rank);
  act.latent.assign(rank, 0.0);
  for (std::size_t r = 0; r < rank; ++r) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      acc += latent_down_[r * dim + j] * act.normalized[j];
    }
    act.latent[r] = acc;
  }
  act.mixed.assign(dim, 0.0);
  act.hidden.assign(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    double acc = 1.0;
    for (std::size_t r = 0; r < rank; ++r) {
      acc += latent_up_[i * rank + r] * act.latent[r];
    }
    act.mixed[i] = acc;
    act.hidden[i] = act.image_code[i] * act.mixed[i];
  }

  act.logits.assign(output_bias_.begin(), output_bias_.end());
  for (std::size_t v = 0; v < static_cast<std::size_t>(kActionVocabulary); ++v) {
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      acc += output_[v * dim + d] * act.hidden[d];
    }
    act.logits[v] += acc;
  }
  Softmax(act.logits, act.probabilities);
}

ActionDistribution MockVla::Forward(const Image& image,
                                    const Prompt& prompt) const {
  CheckShape(image.shape());
  Activations act;
  RunForward(image.pixels(), Embed(prompt.tokens()), act);
  return ActionDistribution(std::move(act.probabilities));
}

ActionDistribution MockVla::ForwardEmbedded(
    std::span<const double> pixels, std::span<const double> embeddings) const {
  Activations act;
  RunForward(pixels, embeddings, act);
  return ActionDistribution(std::move(act.probabilities));
}

LossEvaluation MockVla::Evaluate(const Image& image, const Prompt& prompt,
                                 const FreezeSpec& spec,
                                 unsigned parts) const {
  CheckShape(image.shape());
  spec.CheckVocabulary(kActionVocabulary);
  Activations act;
  RunForward(image.pixels(), Embed(prompt.tokens()), act);

  LossEvaluation out;
  double mass = 0.0;
  for (int id : spec.freeze_token_ids()) mass += act.probabilities[id];
  const FreezeLoss loss = FreezeLossFromMass(mass);
  out.loss = loss.value;
  out.at_ceiling = loss.at_ceiling;
  out.freeze_probability = mass;
  if (parts == kNoGradient) return out;

  const auto dim = static_cast<std::size_t>(options_.embedding_dim);
  const auto actions = static_cast<std::size_t>(kActionVocabulary);

  // dL/dlogit_v = p_v - [v in S] exp(l_v - logsumexp_S(l)); the second term
  // stays finite when the freeze mass underflows.
  double top = -INFINITY;
  for (int id : spec.freeze_token_ids()) top = std::max(top, act.logits[id]);
  double subset_total = 0.0;
  for (int id : spec.freeze_token_ids()) {
    subset_total += std::exp(act.logits[id] - top);
  }
  std::vector<double> grad_logits(act.probabilities);
  for (int id : spec.freeze_token_ids()) {
    grad_logits[id] -= std::exp(act.logits[id] - top) / subset_total;
  }

  std::vector<double> grad_hidden(dim, 0.0);
  for (std::size_t v = 0; v < actions; ++v) {
    const double g = grad_logits[v];
    for (std::size_t d = 0; d < dim; ++d) grad_hidden[d] += output_[v * dim + d] * g;
  }

  if (parts & kImageGradient) {
    const Shape& shape = options_.input_shape;
    const int patch = options_.patch_size;
    const auto features = static_cast<std::size_t>(feature_dim_);
    std::vector<double> grad_features(features, 0.0);
    for (std::size_t d = 0; d < dim; ++d) {
      const double g = grad_hidden[d] * act.mixed[d];
      const double* row = projection_.data() + d * features;
      for (std::size_t j = 0; j < features; ++j) grad_features[j] += row[j] * g;
    }
    const double inv_area = 1.0 / (patch * patch);
    out.image_gradient.resize(shape.size());
    for (int r = 0; r < shape.height; ++r) {
      for (int c = 0; c < shape.width; ++c) {
        const std::size_t cell =
            static_cast<std::size_t>((r / patch) * patches_per_row_ + c / patch) *
            shape.channels;
        const std::size_t base =
            (static_cast<std::size_t>(r) * shape.width + c) * shape.channels;
        for (int ch = 0; ch < shape.channels; ++ch) {
          out.image_gradient[base + ch] =
              pixel_weight_[base + ch] * grad_features[cell + ch] * inv_area;
        }
      }
    }
  }

  if (parts & kEmbeddingGradient) {
    const auto rank = static_cast<std::size_t>(options_.prompt_rank);
    std::vector<double> grad_latent(rank, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      const double g = grad_hidden[i] * act.image_code[i];
      for (std::size_t r = 0; r < rank; ++r) {
        grad_latent[r] += latent_up_[i * rank + r] * g;
      }
    }
    std::vector<double> grad_normalized(dim, 0.0);
    for (std::size_t r = 0; r < rank; ++r) {
      for (std::size_t j = 0; j < dim; ++j) {
        grad_normalized[j] += latent_down_[r * dim + j] * grad_latent[r];
      }
    }
    double norm_dot = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      norm_dot += act.normalized[d] * grad_normalized[d];
    }
    std::vector<double> grad_pooled(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      grad_pooled[d] = (grad_normalized[d] -
                        act.normalized[d] * norm_dot / static_cast<double>(dim)) /
                       act.rms;
    }
    double pooled_dot = 0.0;
    for (std::size_t d = 0; d < dim; ++d) pooled_dot += act.pooled[d] * grad_pooled[d];
    const std::size_t tokens = act.attention.size();
    out.embedding_gradient.resize(tokens * dim);
    for (std::size_t t = 0; t < tokens; ++t) {
      const double* e = act.embeddings.data() + t * dim;
      double e_dot = 0.0;
      for (std::size_t d = 0; d < dim; ++d) e_dot += e[d] * grad_pooled[d];
      const double a = act.attention[t];
      const double score_grad = a * (e_dot - pooled_dot);
      for (std::size_t d = 0; d < dim; ++d) {
        out.embedding_gradient[t * dim + d] = a * grad_pooled[d] + score_grad * key_[d];
      }
    }
  }
  return out;
}

}  // namespace vlafreeze
