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

#ifndef VLAFREEZE_TOOLS_CLI_RUN_CONFIG_H_
#define VLAFREEZE_TOOLS_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlafreeze/adapter_registry.h"
#include "vlafreeze/attack_config.h"
#include "vlafreeze/eval.h"
#include "vlafreeze/prompt.h"

namespace vlafreeze::cli {

inline constexpr int kRunConfigSchemaVersion = 1;

struct TaskSpec {
  std::string name;
  std::filesystem::path corpus;
};

// Everything a run reads, resolved from one YAML file. Relative paths are
// resolved against the directory holding that file.
//
//   schema_version: 1
//   seed: 0
//   adapter: {name, seed, patch_size, embedding_dim, input_shape: [h, w, c]}
//   attack: {kind, outer_steps, inner_steps, step_size, epsilon,
//            prompt_count, use_min_max, harden_every}
//   prompts: {source, reference_corpus, template}
//   lexicon: path
//   freeze: {token_ids: [..], detection_repeats}
//   evaluation: {images, image_seed, tasks: [{name, corpus}, ..]}
//   sweep: {axes: [{name, values: [..]}, ..], cell_limit}
//   output_dir: path
//   workers: 1
//
// Real-valued fields also accept fractions written as "a/b" (e.g. 4/255).
struct RunConfig {
  int schema_version = kRunConfigSchemaVersion;
  std::filesystem::path source;  // the YAML file, if any
  AdapterSpec adapter;
  AttackKind attack_kind = AttackKind::kFreezeVla;
  AttackConfig attack;  // attack.seed carries the top-level seed
  std::filesystem::path reference_corpus;
  std::string template_name = "default";
  std::filesystem::path lexicon;  // empty: no lexicon
  std::vector<int> freeze_token_ids = {0};
  std::optional<int> detection_repeats;
  int images = 1;
  std::optional<std::uint64_t> image_seed;  // defaults to attack.seed
  std::vector<TaskSpec> tasks;
  std::vector<SweepAxis> sweep_axes;
  std::size_t cell_limit = 512;
  std::filesystem::path output_dir;
  int workers = 1;

  const PromptTemplate& prompt_template() const;
  std::uint64_t scene_seed() const { return image_seed.value_or(attack.seed); }

  // Cross-field checks (AttackConfig::Validate, lexicon presence for
  // freezevla, positive counts). Throws kValidation.
  void Validate() const;

  // Files named by the config, in a fixed order.
  std::vector<std::filesystem::path> InputFiles() const;
};

// Parses and validates. Errors are kValidation (or kParse for malformed
// YAML) and read "<source>:<line>:<column>: <key path>: <problem>".
RunConfig ParseRunConfig(std::string_view yaml,
                         const std::filesystem::path& source);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Names accepted by prompts.template.
std::optional<PromptTemplate> TemplateByName(std::string_view name);

// Canonical JSON of the fields that determine results: everything except
// output_dir, workers and the sweep section. Input files enter as the
// FNV-1a-64 digest of their contents, so moving a run tree keeps its hash.
// Throws kMissingArtifact if an input file is absent.
std::string CanonicalConfigJson(const RunConfig& config);
std::string ConfigHash(const RunConfig& config);

}  // namespace vlafreeze::cli

#endif  // VLAFREEZE_TOOLS_CLI_RUN_CONFIG_H_
