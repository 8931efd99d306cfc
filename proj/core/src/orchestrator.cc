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

#include "vlafreeze/orchestrator.h"

#include <chrono>

#include "vlafreeze/rng.h"

namespace vlafreeze {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// The one image loop every gradient-based attack runs.
AttackResult RunImageLoop(AttackKind kind, const ModelAdapter& adapter,
                          const Image& image, const AttackConfig& config,
                          std::vector<Prompt> prompts,
                          const SynonymLexicon* lexicon, int inner_rounds,
                          const FreezeSpec& spec, const AttackOptions& options) {
  const auto start = Clock::now();
  adapter.CheckShape(image.shape());
  spec.CheckVocabulary(adapter.action_vocabulary_size());

  AttackResult result{AdversarialImage(image, config.epsilon),
                      prompts,
                      prompts,
                      {},
                      {},
                      config,
                      kind,
                      0.0};
  std::vector<CandidateCursor> cursors(prompts.size());
  try {
    for (int k = 0; k < config.outer_steps; ++k) {
      OuterIterationRecord record;
      record.iteration = k;
      if (inner_rounds > 0 && lexicon != nullptr && k % config.harden_every == 0) {
        HardenResult hardened = HardenPrompts(
            adapter, result.adversarial_image.current(),
            std::move(result.final_prompts), inner_rounds, *lexicon, spec,
            &cursors, options.workers);
        result.final_prompts = std::move(hardened.prompts);
        for (auto& sub : hardened.records) {
          sub.outer_iteration = k;
          ++record.proposals;
          record.accepted += sub.accepted ? 1 : 0;
          result.substitutions.push_back(std::move(sub));
        }
      }
      MinimizeResult step =
          MinimizeImage(adapter, result.adversarial_image,
                        result.final_prompts, 1, config.step_size, spec,
                        options.workers);
      result.adversarial_image = std::move(step.image);
      record.step = std::move(step.traces.front());
      record.step.step = k;
      result.loss_trace.push_back(std::move(record));
    }
  } catch (const Error& error) {
    result.wall_clock_seconds = SecondsSince(start);
    throw AttackError(error, std::move(result));
  }
  result.wall_clock_seconds = SecondsSince(start);
  return result;
}

void RequirePromptCount(const std::vector<Prompt>& prompts, std::size_t want,
                        std::string_view who) {
  if (prompts.size() != want) {
    Fail(ErrorCode::kValidation,
         std::string(who) + " needs " + std::to_string(want) +
             " prompt(s), got " + std::to_string(prompts.size()));
  }
}

}  // namespace

bool AttackResult::SameOutcome(const AttackResult& other) const {
  return adversarial_image == other.adversarial_image &&
         initial_prompts == other.initial_prompts &&
         final_prompts == other.final_prompts &&
         substitutions == other.substitutions && loss_trace == other.loss_trace;
}

AttackResult FreezeVlaAttack(const ModelAdapter& adapter, const Image& image,
                             const AttackConfig& config,
                             std::vector<Prompt> prompts,
                             const SynonymLexicon& lexicon,
                             const FreezeSpec& spec,
                             const AttackOptions& options) {
  config.Validate();
  RequirePromptCount(prompts, static_cast<std::size_t>(config.prompt_count),
                     "freezevla");
  const int rounds = config.use_min_max ? config.inner_steps : 0;
  return RunImageLoop(AttackKind::kFreezeVla, adapter, image, config,
                      std::move(prompts), &lexicon, rounds, spec, options);
}

AttackResult BaselineAttack(AttackKind kind, const ModelAdapter& adapter,
                            const Image& image, const AttackConfig& config,
                            std::vector<Prompt> prompts,
                            const FreezeSpec& spec,
                            const AttackOptions& options) {
  config.Validate();
  switch (kind) {
    case AttackKind::kRandomNoise: {
      const auto start = Clock::now();
      adapter.CheckShape(image.shape());
      Rng rng(config.seed);
      std::vector<double> candidate(image.pixels().begin(), image.pixels().end());
      for (double& v : candidate) v += rng.Uniform(-config.epsilon, config.epsilon);
      AdversarialImage adv(
          image, Image(image.shape(), ProjectLinf(candidate, image, config.epsilon)),
          config.epsilon);
      AttackResult result{std::move(adv), prompts, prompts, {}, {}, config, kind, 0.0};
      result.wall_clock_seconds = SecondsSince(start);
      return result;
    }
    case AttackKind::kPgdSingle:
      RequirePromptCount(prompts, 1, "pgd-single");
      return RunImageLoop(kind, adapter, image, config, std::move(prompts),
                          nullptr, 0, spec, options);
    case AttackKind::kMultiPrompt:
      RequirePromptCount(prompts, static_cast<std::size_t>(config.prompt_count),
                         "multi-prompt");
      return RunImageLoop(kind, adapter, image, config, std::move(prompts),
                          nullptr, 0, spec, options);
    case AttackKind::kFreezeVla:
      break;
  }
  Fail(ErrorCode::kValidation, "freezevla is not a baseline attack");
}

AttackResult RunAttack(AttackKind kind, const ModelAdapter& adapter,
                       const Image& image, const AttackConfig& config,
                       std::vector<Prompt> prompts,
                       const SynonymLexicon& lexicon, const FreezeSpec& spec,
                       const AttackOptions& options) {
  if (kind == AttackKind::kFreezeVla) {
    return FreezeVlaAttack(adapter, image, config, std::move(prompts), lexicon,
                           spec, options);
  }
  return BaselineAttack(kind, adapter, image, config, std::move(prompts), spec,
                        options);
}

}  // namespace vlafreeze
