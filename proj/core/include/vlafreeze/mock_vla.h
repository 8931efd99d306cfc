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

#ifndef VLAFREEZE_MOCK_VLA_H_
#define VLAFREEZE_MOCK_VLA_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vlafreeze/model_adapter.h"
#include "vlafreeze/tokenizer.h"

namespace vlafreeze {

struct MockVlaOptions {
  std::uint64_t seed = 0;
  int patch_size = 8;
  int embedding_dim = 32;
  Shape input_shape = {32, 32, 3};
  // Scale of W relative to 1/sqrt(F).
  double image_gain = 128.0;
  double embedding_scale = 1.0;
  // Width of the prompt latent z.
  int prompt_rank = 16;
  // Scale of U relative to 1/sqrt(R).
  double prompt_gain = 1.0;
  // Scale of O relative to 1/sqrt(D).
  double output_scale = 1.0;
  // Added to the freeze token's output bias.
  double freeze_bias = -3.0;
};

// Deterministic differentiable stand-in for a vision-language-action model.
//
//   f      = per-patch, per-channel mean of m * (pixel - 1/2)      [F]
//   u      = W f + b                                              [D]
//   s_t    = <e_t, k>,  a = softmax_t(s),  q = sum_t a_t e_t       [D]
//   z      = V q / rms(q)                                         [R]
//   h      = u (elementwise) (1 + U z)                            [D]
//   logits = O h + c,  p = softmax(logits)                        [64]
//
// m is a fixed random +-1 mask over pixels, centered within every patch and
// channel, so flat regions of a scene cancel while pixel-level noise does
// not. e_t are rows of the
// token embedding table, k an attention key, and W, b, U, V, O, c dense
// parameters. Every parameter is drawn from Rng(seed) at construction in the
// order: embeddings, key, W, b, U, V, O, c, m. Action token 0 is the freeze
// token; its bias is lowered so clean inputs rarely pick it.
class MockVla final : public ModelAdapter {
 public:
  static constexpr int kActionVocabulary = 64;
  static constexpr int kFreezeToken = 0;

  explicit MockVla(MockVlaOptions options = {});

  const std::string& name() const override { return name_; }
  const Tokenizer& tokenizer() const override { return tokenizer_; }
  int embedding_dim() const override { return options_.embedding_dim; }
  int action_vocabulary_size() const override { return kActionVocabulary; }
  void CheckShape(const Shape& shape) const override;

  ActionDistribution Forward(const Image& image,
                             const Prompt& prompt) const override;
  LossEvaluation Evaluate(const Image& image, const Prompt& prompt,
                          const FreezeSpec& spec,
                          unsigned parts) const override;

  // Rows of the embedding table for `tokens` (tokens x D, row-major).
  // Throws kTokenizer for out-of-range ids.
  std::vector<double> Embed(std::span<const int> tokens) const;
  // Forward pass with explicit prompt embeddings, for embedding-space
  // probes. `pixels` must match the input shape but need not lie in [0,1].
  ActionDistribution ForwardEmbedded(std::span<const double> pixels,
                                     std::span<const double> embeddings) const;

  const MockVlaOptions& options() const { return options_; }
  int feature_dim() const { return feature_dim_; }
  int patches_per_row() const { return patches_per_row_; }

  // Parameter views, row-major.
  std::span<const double> embedding_table() const { return embeddings_; }
  std::span<const double> attention_key() const { return key_; }
  std::span<const double> image_projection() const { return projection_; }
  std::span<const double> image_bias() const { return projection_bias_; }
  std::span<const double> latent_up() const { return latent_up_; }      // D x R
  std::span<const double> latent_down() const { return latent_down_; }  // R x D
  std::span<const double> output_projection() const { return output_; }
  std::span<const double> output_bias() const { return output_bias_; }
  std::span<const double> pixel_weight() const { return pixel_weight_; }

  static FreezeSpec DefaultFreezeSpec() { return FreezeSpec({kFreezeToken}); }

 private:
  struct Activations;
  void RunForward(std::span<const double> pixels,
                  std::span<const double> embeddings,
                  Activations& act) const;
  void CheckTokens(std::span<const int> tokens) const;
  // Feature slot a pixel index contributes to.
  std::size_t FeatureOf(std::size_t pixel) const;

  MockVlaOptions options_;
  std::string name_ = "mock-vla";
  PieceTokenizer tokenizer_;
  int feature_dim_ = 0;
  int patches_per_row_ = 0;
  int patches_per_col_ = 0;

  std::vector<double> embeddings_;
  std::vector<double> key_;
  std::vector<double> projection_;
  std::vector<double> projection_bias_;
  std::vector<double> latent_up_;
  std::vector<double> latent_down_;
  std::vector<double> output_;
  std::vector<double> output_bias_;
  std::vector<double> pixel_weight_;
};

}  // namespace vlafreeze

#endif  // VLAFREEZE_MOCK_VLA_H_
