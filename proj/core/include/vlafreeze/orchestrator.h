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

#ifndef VLAFREEZE_ORCHESTRATOR_H_
#define VLAFREEZE_ORCHESTRATOR_H_

#include <vector>

#include "vlafreeze/attack_config.h"
#include "vlafreeze/error.h"
#include "vlafreeze/freeze.h"
#include "vlafreeze/image.h"
#include "vlafreeze/inner_max.h"
#include "vlafreeze/lexicon.h"
#include "vlafreeze/model_adapter.h"
#include "vlafreeze/outer_min.h"
#include "vlafreeze/prompt.h"

namespace vlafreeze {

struct OuterIterationRecord {
  int iteration = 0;
  int proposals = 0;
  int accepted = 0;
  ImageStepTrace step;

  friend bool operator==(const OuterIterationRecord&,
                         const OuterIterationRecord&) = default;
};

struct AttackResult {
  AdversarialImage adversarial_image;
  std::vector<Prompt> initial_prompts;
  std::vector<Prompt> final_prompts;
  std::vector<SubstitutionRecord> substitutions;
  std::vector<OuterIterationRecord> loss_trace;
  AttackConfig config;
  AttackKind kind = AttackKind::kFreezeVla;
  double wall_clock_seconds = 0.0;

  // Equality of everything the optimization produced: image, prompts,
  // substitution log and trace. Ignores kind, config and timing.
  bool SameOutcome(const AttackResult& other) const;
};

// Carries the trace accumulated before the failure.
class AttackError : public Error {
 public:
  AttackError(const Error& cause, AttackResult partial)
      : Error(cause.code(), cause.what()), partial_(std::move(partial)) {}

  const AttackResult& partial() const { return partial_; }

 private:
  AttackResult partial_;
};

struct AttackOptions {
  int workers = 1;
};

// Alternating prompt hardening and aggregated image steps, starting from
// the clean image: for each of config.outer_steps iterations, run
// config.inner_steps hardening rounds (every config.harden_every
// iterations, when config.use_min_max) and then one sign step against the
// current prompt set. Prompt state, including candidate cycling, persists
// across iterations. Requires prompts.size() == config.prompt_count.
AttackResult FreezeVlaAttack(const ModelAdapter& adapter, const Image& image,
                             const AttackConfig& config,
                             std::vector<Prompt> prompts,
                             const SynonymLexicon& lexicon,
                             const FreezeSpec& spec,
                             const AttackOptions& options = {});

// random-noise: one uniform draw in [-eps, eps] per pixel from
//   Rng(config.seed), projected; prompts are carried through untouched.
// pgd-single: the image loop above with exactly one prompt and no
//   hardening.
// multi-prompt: the image loop with config.prompt_count prompts and no
//   hardening.
AttackResult BaselineAttack(AttackKind kind, const ModelAdapter& adapter,
                            const Image& image, const AttackConfig& config,
                            std::vector<Prompt> prompts,
                            const FreezeSpec& spec,
                            const AttackOptions& options = {});

// Dispatches on `kind`; `lexicon` is only read for kFreezeVla.
AttackResult RunAttack(AttackKind kind, const ModelAdapter& adapter,
                       const Image& image, const AttackConfig& config,
                       std::vector<Prompt> prompts,
                       const SynonymLexicon& lexicon, const FreezeSpec& spec,
                       const AttackOptions& options = {});

}  // namespace vlafreeze

#endif  // VLAFREEZE_ORCHESTRATOR_H_
