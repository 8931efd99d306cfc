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

#ifndef VLAFREEZE_OUTER_MIN_H_
#define VLAFREEZE_OUTER_MIN_H_

#include <span>
#include <vector>

#include "vlafreeze/freeze.h"
#include "vlafreeze/image.h"
#include "vlafreeze/model_adapter.h"
#include "vlafreeze/prompt.h"

namespace vlafreeze {

struct ImageStepTrace {
  int step = 0;
  double loss_before = 0.0;  // summed over prompts
  double loss_after = 0.0;
  double linf_from_base = 0.0;
  std::vector<double> prompt_losses_after;
  double mean_freeze_probability_after = 0.0;

  friend bool operator==(const ImageStepTrace&,
                         const ImageStepTrace&) = default;
};

// Plain sum over prompts of dL/dpixels at the current adversarial image.
std::vector<double> AggregateGradient(const ModelAdapter& adapter,
                                      const AdversarialImage& image,
                                      const std::vector<Prompt>& prompts,
                                      const FreezeSpec& spec, int workers = 1);

// current <- Clip(current - step_size * sign(gradient)), sign(0) = 0.
// Throws kNumerical naming the first non-finite gradient coordinate.
AdversarialImage SignStep(const AdversarialImage& image,
                          std::span<const double> gradient, double step_size);

struct MinimizeResult {
  AdversarialImage image;
  std::vector<ImageStepTrace> traces;
};

// `steps` aggregated sign steps with a trace entry per step.
MinimizeResult MinimizeImage(const ModelAdapter& adapter,
                             const AdversarialImage& image,
                             const std::vector<Prompt>& prompts, int steps,
                             double step_size, const FreezeSpec& spec,
                             int workers = 1);

}  // namespace vlafreeze

#endif  // VLAFREEZE_OUTER_MIN_H_
