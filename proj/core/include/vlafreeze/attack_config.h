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

#ifndef VLAFREEZE_ATTACK_CONFIG_H_
#define VLAFREEZE_ATTACK_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vlafreeze {

enum class AttackKind { kRandomNoise, kPgdSingle, kMultiPrompt, kFreezeVla };
enum class PromptSourceKind { kCorpusRandom, kLlmGenerated };

std::string_view AttackKindName(AttackKind kind);
std::optional<AttackKind> ParseAttackKind(std::string_view name);
std::string_view PromptSourceKindName(PromptSourceKind kind);
std::optional<PromptSourceKind> ParsePromptSourceKind(std::string_view name);

// Row label in result tables, e.g. "FreezeVLA + GPT".
std::string AttackDisplayName(AttackKind kind, PromptSourceKind source);

struct AttackConfig {
  int outer_steps = 100;          // K: image steps, one per outer iteration
  int inner_steps = 10;           // M: prompt rounds per outer iteration
  double step_size = 1.0 / 255;   // alpha
  double epsilon = 4.0 / 255;     // L-inf budget
  int prompt_count = 20;          // N reference prompts
  std::uint64_t seed = 0;
  bool use_min_max = true;
  PromptSourceKind prompt_source = PromptSourceKind::kCorpusRandom;
  int harden_every = 1;           // outer iterations between prompt rounds

  // Throws kValidation naming the violated constraint.
  void Validate() const;

  friend bool operator==(const AttackConfig&, const AttackConfig&) = default;
};

}  // namespace vlafreeze

#endif  // VLAFREEZE_ATTACK_CONFIG_H_
