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

#include "vlafreeze/model_adapter.h"

#include <cmath>

#include "vlafreeze/error.h"

namespace vlafreeze {

double FreezeProbability(const ModelAdapter& adapter, const Image& image,
                         const Prompt& prompt, const FreezeSpec& spec) {
  return spec.FreezeMass(adapter.Forward(image, prompt));
}

std::vector<double> ImageGradient(const ModelAdapter& adapter,
                                  const Image& image, const Prompt& prompt,
                                  const FreezeSpec& spec) {
  return adapter.Evaluate(image, prompt, spec, kImageGradient).image_gradient;
}

std::vector<double> TokenSaliency(const ModelAdapter& adapter,
                                  const Image& image, const Prompt& prompt,
                                  const FreezeSpec& spec) {
  const TokenSpan span = prompt.task_span();
  if (span.empty()) return {};
  const LossEvaluation eval =
      adapter.Evaluate(image, prompt, spec, kEmbeddingGradient);
  const auto dim = static_cast<std::size_t>(adapter.embedding_dim());
  if (eval.embedding_gradient.size() != prompt.tokens().size() * dim) {
    Fail(ErrorCode::kAdapter, adapter.name() +
                                  " returned an embedding gradient of the "
                                  "wrong size");
  }
  std::vector<double> scores;
  scores.reserve(span.size());
  for (std::size_t t = span.begin; t < span.end; ++t) {
    double sq = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double g = eval.embedding_gradient[t * dim + d];
      sq += g * g;
    }
    scores.push_back(std::sqrt(sq));
  }
  return scores;
}

std::vector<double> WordSaliency(const Prompt& prompt,
                                 const std::vector<double>& token_saliency) {
  const TokenSpan task = prompt.task_span();
  if (token_saliency.size() != task.size()) {
    Fail(ErrorCode::kDimension, "token saliency does not cover the task span");
  }
  std::vector<double> scores(prompt.task_words().size(), 0.0);
  for (std::size_t w = 0; w < scores.size(); ++w) {
    const TokenSpan span = prompt.WordTokens(w);
    for (std::size_t t = span.begin; t < span.end; ++t) {
      scores[w] += token_saliency[t - task.begin];
    }
  }
  return scores;
}

}  // namespace vlafreeze
