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

#ifndef VLAFREEZE_TOOLS_CLI_COMMANDS_H_
#define VLAFREEZE_TOOLS_CLI_COMMANDS_H_

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cli/run_config.h"
#include "vlafreeze/adapter_registry.h"
#include "vlafreeze/error.h"
#include "vlafreeze/eval.h"
#include "vlafreeze/orchestrator.h"

namespace vlafreeze::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitRuntime = 3,
  kExitMissingArtifact = 4,
};

int ExitCodeFor(ErrorCode code);

// Side channels a command uses; tests swap them out.
struct CommandEnv {
  std::ostream* out = nullptr;  // defaults to std::cout
  std::ostream* err = nullptr;  // defaults to std::cerr
  std::function<std::unique_ptr<ModelAdapter>(const AdapterSpec&)> make_adapter =
      MakeAdapter;
  std::function<std::string()> clock;  // defaults to UtcNow

  std::ostream& Out() const;
  std::ostream& Err() const;
  std::string Now() const;
};

// Command-line values that replace the corresponding config fields.
struct ConfigOverrides {
  std::optional<int> outer_steps;
  std::optional<int> inner_steps;
  std::optional<double> step_size;
  std::optional<double> epsilon;
  std::optional<int> prompt_count;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::filesystem::path> output_dir;

  void ApplyTo(RunConfig& config) const;
};

// ---------------------------------------------------------------------------
// The attack + evaluation pipeline shared by attack and sweep.

struct LoadedInputs {
  PromptCorpus reference{"reference", {"placeholder"}, CorpusSource::kUser};
  SynonymLexicon lexicon;
  std::vector<PromptCorpus> tests;  // one per config task
};
LoadedInputs LoadInputs(const RunConfig& config);

FreezeSpec MakeFreezeSpec(const RunConfig& config, const ModelAdapter& adapter);

struct RunOutputs {
  std::string config_hash;
  std::vector<Image> images;
  std::vector<Prompt> reference;
  std::vector<AttackResult> attacks;  // completed attacks, in image order
  std::optional<AttackResult> partial;  // the attack that failed, if any
  EvalReport report;
};

// Attacks config.images scenes (seeds as in AttackImages) and evaluates
// them on every task. Fills `out` as it goes so a failure leaves the
// completed part behind.
void ExecuteRun(const RunConfig& config, const ModelAdapter& adapter,
                const LoadedInputs& inputs, const CommandEnv& env,
                RunOutputs& out);

// Report rows for `attacks` against every task of `config`.
EvalReport EvaluateRun(const RunConfig& config, const ModelAdapter& adapter,
                       const std::vector<PromptCorpus>& tests,
                       const std::vector<AttackResult>& attacks,
                       const std::string& config_hash);

// Mean over a report's rows, the value a sweep cell records.
double MeanAsrPercent(const EvalReport& report);

// ---------------------------------------------------------------------------
// Subcommands. Each returns a process exit code and reports problems on
// env.Err().

// Runs the configured attack and writes a run directory at output_dir.
int CmdAttack(const std::filesystem::path& config_path,
              const ConfigOverrides& overrides, const CommandEnv& env);

// Re-evaluates the run directory produced from `config_path` (default: its
// output_dir) on the config's tasks and writes <run>/eval/.
int CmdEval(const std::filesystem::path& config_path,
            const std::optional<std::filesystem::path>& run_dir,
            const ConfigOverrides& overrides, const CommandEnv& env);

// Runs every cell of the config's sweep grid (or `axes` when non-empty)
// and writes cells/cell_<i>/report.json, sweep.json and plots.
int CmdSweep(const std::filesystem::path& config_path,
             const std::vector<SweepAxis>& axes,
             const ConfigOverrides& overrides, const CommandEnv& env);

struct GenPromptsOptions {
  int count = 20;
  std::string endpoint;  // chat-completions URL
  std::string model = "o3";
  std::string api_key_env = "OPENAI_API_KEY";
  std::optional<std::filesystem::path> stub_transcript;
  std::optional<std::filesystem::path> scene_png;
  std::optional<std::string> scene_description;
  int retry_limit = 2;
  std::filesystem::path out;
  std::optional<std::filesystem::path> transcript_out;
};

// Asks the service (or replays a stored transcript) for reference prompts
// and writes the corpus and the call transcript.
int CmdGenPrompts(const GenPromptsOptions& options, const CommandEnv& env);

// Renders stored reports and sweep grids. Inputs are report.json /
// sweep.json files or directories holding one. With no output directory
// the CSV tables go to env.Out() and no plots are written.
int CmdReport(const std::vector<std::filesystem::path>& inputs,
              const std::optional<std::filesystem::path>& out_dir,
              const CommandEnv& env);

// "name=v1,v2,..." with fractions allowed. Throws kValidation.
SweepAxis ParseAxisFlag(const std::string& text);

}  // namespace vlafreeze::cli

#endif  // VLAFREEZE_TOOLS_CLI_COMMANDS_H_
