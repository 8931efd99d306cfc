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

#ifndef VLAFREEZE_MODEL_ADAPTER_H_
#define VLAFREEZE_MODEL_ADAPTER_H_

#include <string>
#include <vector>

#include "vlafreeze/freeze.h"
#include "vlafreeze/image.h"
#include "vlafreeze/prompt.h"
#include "vlafreeze/tokenizer.h"

namespace vlafreeze {

enum GradientParts : unsigned {
  kNoGradient = 0,
  kImageGradient = 1u << 0,
  kEmbeddingGradient = 1u << 1,
  kAllGradients = kImageGradient | kEmbeddingGradient,
};

// Freeze loss at one (image, prompt) pair and whichever gradients were
// requested; unrequested gradients are left empty.
struct LossEvaluation {
  double loss = 0.0;
  bool at_ceiling = false;
  double freeze_probability = 0.0;
  // dL/dpixel, same layout as Image::pixels().
  std::vector<double> image_gradient;
  // dL/d(token embedding), tokens x embedding_dim, row-major.
  std::vector<double> embedding_gradient;
};

// The gradient oracle every attack talks through.
//
// Implementations must be deterministic for identical inputs; adapters that
// are not report it through deterministic() and eval repeats its queries.
// Adapters that cannot serve concurrent const calls return false from
// concurrent_reads() and the framework serializes them.
class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;

  virtual const std::string& name() const = 0;
  virtual const Tokenizer& tokenizer() const = 0;
  virtual int embedding_dim() const = 0;
  virtual int action_vocabulary_size() const = 0;
  // Throws kDimension if the adapter cannot consume images of this shape.
  virtual void CheckShape(const Shape& shape) const = 0;

  virtual bool deterministic() const { return true; }
  virtual bool concurrent_reads() const { return true; }

  virtual ActionDistribution Forward(const Image& image,
                                     const Prompt& prompt) const = 0;

  virtual LossEvaluation Evaluate(const Image& image, const Prompt& prompt,
                                  const FreezeSpec& spec,
                                  unsigned parts) const = 0;

  // Convenience wrapper: a prompt built with this adapter's tokenizer.
  Prompt MakePrompt(const PromptTemplate& prompt_template,
                    std::string_view task) const {
    return Prompt::FromTask(tokenizer(), prompt_template, task);
  }
};

double FreezeProbability(const ModelAdapter& adapter, const Image& image,
                         const Prompt& prompt, const FreezeSpec& spec);

// dL/dpixels for L = freeze loss of Forward(image, prompt).
std::vector<double> ImageGradient(const ModelAdapter& adapter,
                                  const Image& image, const Prompt& prompt,
                                  const FreezeSpec& spec);

// Euclidean norm of dL/d(embedding) for every token in the task span, in
// span order. Template tokens are not scored. Empty span -> empty result.
std::vector<double> TokenSaliency(const ModelAdapter& adapter,
                                  const Image& image, const Prompt& prompt,
                                  const FreezeSpec& spec);

// Token saliency summed over each task word's sub-tokens.
std::vector<double> WordSaliency(const Prompt& prompt,
                                 const std::vector<double>& token_saliency);

}  // namespace vlafreeze

#endif  // VLAFREEZE_MODEL_ADAPTER_H_
