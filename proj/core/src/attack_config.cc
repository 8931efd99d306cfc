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

#include "vlafreeze/attack_config.h"

#include <array>
#include <sstream>

#include "vlafreeze/error.h"

namespace vlafreeze {
namespace {

constexpr std::array<std::pair<AttackKind, std::string_view>, 4> kKinds = {{
    {AttackKind::kRandomNoise, "random-noise"},
    {AttackKind::kPgdSingle, "pgd-single"},
    {AttackKind::kMultiPrompt, "multi-prompt"},
    {AttackKind::kFreezeVla, "freezevla"},
}};

constexpr std::array<std::pair<PromptSourceKind, std::string_view>, 2>
    kSources = {{
        {PromptSourceKind::kCorpusRandom, "corpus-random"},
        {PromptSourceKind::kLlmGenerated, "llm-generated"},
    }};

}  // namespace

std::string_view AttackKindName(AttackKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<AttackKind> ParseAttackKind(std::string_view name) {
  for (const auto& [k, n] : kKinds) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string_view PromptSourceKindName(PromptSourceKind kind) {
  for (const auto& [k, name] : kSources) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<PromptSourceKind> ParsePromptSourceKind(std::string_view name) {
  for (const auto& [k, n] : kSources) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string AttackDisplayName(AttackKind kind, PromptSourceKind source) {
  std::string label;
  switch (kind) {
    case AttackKind::kRandomNoise: label = "Random Noise"; break;
    case AttackKind::kPgdSingle: label = "PGD"; break;
    case AttackKind::kMultiPrompt: label = "Multi-Prompt"; break;
    case AttackKind::kFreezeVla: label = "FreezeVLA"; break;
  }
  // Random noise and single-prompt PGD have no prompt set to source.
  const bool uses_prompt_set =
      kind == AttackKind::kMultiPrompt || kind == AttackKind::kFreezeVla;
  if (uses_prompt_set && source == PromptSourceKind::kLlmGenerated) {
    label += " + GPT";
  }
  return label;
}

void AttackConfig::Validate() const {
  auto fail = [](const std::string& what) {
    Fail(ErrorCode::kValidation, "attack config: " + what);
  };
  if (outer_steps < 0) fail("outer_steps must be >= 0");
  if (inner_steps < 0) fail("inner_steps must be >= 0");
  if (prompt_count < 1) fail("prompt_count must be >= 1");
  if (harden_every < 1) fail("harden_every must be >= 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) fail("epsilon must lie in (0,1]");
  if (!(step_size > 0.0)) fail("step_size must be > 0");
  if (step_size > epsilon) {
    std::ostringstream out;
    out.precision(17);
    out << "step_size <= epsilon violated (step_size " << step_size
        << " > epsilon " << epsilon << ")";
    fail(out.str());
  }
}

}  // namespace vlafreeze
