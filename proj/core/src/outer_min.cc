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

#include <cmath>
#include <sstream>

#include "vlafreeze/error.h"
#include "vlafreeze/parallel.h"

namespace vlafreeze {
namespace {

struct GradientSum {
  std::vector<double> gradient;
  double loss = 0.0;
};

GradientSum SumGradients(const ModelAdapter& adapter, const Image& image,
                         const std::vector<Prompt>& prompts,
                         const FreezeSpec& spec, int workers) {
  if (prompts.empty()) {
    Fail(ErrorCode::kValidation, "gradient aggregation needs prompts");
  }
  if (!adapter.concurrent_reads()) workers = 1;
  std::vector<LossEvaluation> evals(prompts.size());
  ParallelFor(prompts.size(), workers, [&](std::size_t i) {
    evals[i] = adapter.Evaluate(image, prompts[i], spec, kImageGradient);
  });
  GradientSum sum;
  sum.gradient.assign(image.size(), 0.0);
  for (const auto& eval : evals) {
    if (eval.image_gradient.size() != image.size()) {
      Fail(ErrorCode::kAdapter, adapter.name() +
                                    " returned an image gradient of the "
                                    "wrong size");
    }
    for (std::size_t j = 0; j < sum.gradient.size(); ++j) {
      sum.gradient[j] += eval.image_gradient[j];
    }
    sum.loss += eval.loss;
  }
  return sum;
}

}  // namespace

std::vector<double> AggregateGradient(const ModelAdapter& adapter,
                                      const AdversarialImage& image,
                                      const std::vector<Prompt>& prompts,
                                      const FreezeSpec& spec, int workers) {
  return SumGradients(adapter, image.current(), prompts, spec, workers).gradient;
}

AdversarialImage SignStep(const AdversarialImage& image,
                          std::span<const double> gradient, double step_size) {
  const Image& current = image.current();
  if (gradient.size() != current.size()) {
    Fail(ErrorCode::kDimension, "gradient has " +
                                    std::to_string(gradient.size()) +
                                    " entries, image " +
                                    current.shape().ToString());
  }
  if (!(step_size > 0.0)) {
    Fail(ErrorCode::kValidation, "step size must be positive");
  }
  auto pixels = current.pixels();
  std::vector<double> candidate(pixels.begin(), pixels.end());
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    const double g = gradient[i];
    if (!std::isfinite(g)) {
      std::ostringstream out;
      out << "non-finite gradient " << g << " at coordinate " << i;
      Fail(ErrorCode::kNumerical, out.str());
    }
    if (g > 0.0) {
      candidate[i] -= step_size;
    } else if (g < 0.0) {
      candidate[i] += step_size;
    }
  }
  return image.WithCurrent(
      Image(current.shape(),
            ProjectLinf(candidate, image.base(), image.epsilon())));
}

MinimizeResult MinimizeImage(const ModelAdapter& adapter,
                             const AdversarialImage& image,
                             const std::vector<Prompt>& prompts, int steps,
                             double step_size, const FreezeSpec& spec,
                             int workers) {
  if (steps < 0) Fail(ErrorCode::kValidation, "image steps must be >= 0");
  if (!adapter.concurrent_reads()) workers = 1;
  MinimizeResult result{image, {}};
  result.traces.reserve(static_cast<std::size_t>(steps));
  for (int step = 0; step < steps; ++step) {
    const GradientSum sum =
        SumGradients(adapter, result.image.current(), prompts, spec, workers);
    result.image = SignStep(result.image, sum.gradient, step_size);

    ImageStepTrace trace;
    trace.step = step;
    trace.loss_before = sum.loss;
    trace.linf_from_base =
        LinfDistance(result.image.current(), result.image.base());
    trace.prompt_losses_after.resize(prompts.size());
    std::vector<double> probabilities(prompts.size());
    ParallelFor(prompts.size(), workers, [&](std::size_t i) {
      const LossEvaluation eval = adapter.Evaluate(
          result.image.current(), prompts[i], spec, kNoGradient);
      trace.prompt_losses_after[i] = eval.loss;
      probabilities[i] = eval.freeze_probability;
    });
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      trace.loss_after += trace.prompt_losses_after[i];
      trace.mean_freeze_probability_after += probabilities[i];
    }
    trace.mean_freeze_probability_after /= static_cast<double>(prompts.size());
    result.traces.push_back(std::move(trace));
  }
  return result;
}

}  // namespace vlafreeze
