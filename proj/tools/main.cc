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

// vlafreeze: command-line front end.
//
//   vlafreeze attack CONFIG [overrides]
//   vlafreeze eval CONFIG [--run DIR]
//   vlafreeze sweep CONFIG [--axis name=v1,v2,...]...
//   vlafreeze gen-prompts --out FILE (--endpoint URL | --stub-transcript FILE)
//   vlafreeze report INPUT... [--out DIR]
//
// Exit status: 0 success, 2 invalid input, 3 runtime failure, 4 missing
// artifact.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/commands.h"
#include "vlafreeze/error.h"

namespace {

using vlafreeze::cli::ConfigOverrides;

// Fractions such as 4/255 are accepted wherever a budget is expected.
double ParseBudget(const std::string& text) {
  const auto slash = text.find('/');
  std::size_t used = 0;
  if (slash == std::string::npos) {
    const double v = std::stod(text, &used);
    if (used != text.size()) throw CLI::ValidationError("bad number '" + text + "'");
    return v;
  }
  const std::string num = text.substr(0, slash), den = text.substr(slash + 1);
  const double n = std::stod(num, &used);
  if (used != num.size()) throw CLI::ValidationError("bad number '" + text + "'");
  const double d = std::stod(den, &used);
  if (used != den.size() || d == 0.0) {
    throw CLI::ValidationError("bad fraction '" + text + "'");
  }
  return n / d;
}

struct OverrideFlags {
  int outer_steps = 0, inner_steps = 0, prompt_count = 0, workers = 0;
  std::string step_size, epsilon, output;
  std::uint64_t seed = 0;
  CLI::Option* opts[8] = {};

  void Register(CLI::App* app) {
    opts[0] = app->add_option("-K,--outer-steps", outer_steps,
                              "outer iterations / image steps (default 100)");
    opts[1] = app->add_option("-M,--inner-steps", inner_steps,
                              "prompt hardening rounds per outer iteration (default 10)");
    opts[2] = app->add_option("--alpha,--step-size", step_size,
                              "image step size, fractions allowed (default 1/255)");
    opts[3] = app->add_option("--epsilon", epsilon,
                              "L-inf budget, fractions allowed (default 4/255)");
    opts[4] = app->add_option("-N,--prompt-count", prompt_count,
                              "reference prompts (default 20)");
    opts[5] = app->add_option("--seed", seed, "run seed (default 0)");
    opts[6] = app->add_option("--workers", workers, "threads (default 1)");
    opts[7] = app->add_option("-o,--output", output, "output directory");
  }

  ConfigOverrides Get() const {
    ConfigOverrides o;
    if (*opts[0]) o.outer_steps = outer_steps;
    if (*opts[1]) o.inner_steps = inner_steps;
    if (*opts[2]) o.step_size = ParseBudget(step_size);
    if (*opts[3]) o.epsilon = ParseBudget(epsilon);
    if (*opts[4]) o.prompt_count = prompt_count;
    if (*opts[5]) o.seed = seed;
    if (*opts[6]) o.workers = workers;
    if (*opts[7]) o.output_dir = output;
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Action-freezing adversarial attacks on vision-language-action models"};
  app.require_subcommand(1);
  vlafreeze::cli::CommandEnv env;
  int status = 0;

  std::string attack_config;
  OverrideFlags attack_flags;
  CLI::App* attack = app.add_subcommand("attack", "run the configured attack");
  attack->add_option("config", attack_config, "run config (YAML)")->required();
  attack_flags.Register(attack);

  std::string eval_config, eval_run;
  OverrideFlags eval_flags;
  CLI::App* eval = app.add_subcommand("eval", "re-evaluate a stored run on the config's tasks");
  eval->add_option("config", eval_config, "run config (YAML)")->required();
  CLI::Option* eval_run_opt =
      eval->add_option("--run", eval_run, "run directory (default: config output_dir)");
  eval_flags.Register(eval);

  std::string sweep_config;
  std::vector<std::string> sweep_axes;
  OverrideFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "evaluate every cell of a parameter grid");
  sweep->add_option("config", sweep_config, "run config (YAML)")->required();
  sweep->add_option("--axis", sweep_axes,
                    "name=v1,v2,... (epsilon, step_size, outer_steps, inner_steps, "
                    "prompt_count, harden_every, seed); replaces the config's axes");
  sweep_flags.Register(sweep);

  vlafreeze::cli::GenPromptsOptions gen;
  std::string gen_out, gen_stub, gen_scene, gen_description, gen_transcript;
  CLI::App* gen_cmd = app.add_subcommand("gen-prompts", "generate reference prompts with an LLM");
  gen_cmd->add_option("--out", gen_out, "corpus file to write")->required();
  gen_cmd->add_option("-n,--count", gen.count, "prompts to collect")->capture_default_str();
  gen_cmd->add_option("--endpoint", gen.endpoint, "chat-completions URL");
  gen_cmd->add_option("--model", gen.model, "model name")->capture_default_str();
  gen_cmd->add_option("--api-key-env", gen.api_key_env,
                      "environment variable holding the bearer token")
      ->capture_default_str();
  CLI::Option* stub_opt = gen_cmd->add_option(
      "--stub-transcript", gen_stub, "replay responses from a stored transcript");
  CLI::Option* scene_opt = gen_cmd->add_option("--scene-png", gen_scene, "scene image to attach");
  CLI::Option* desc_opt = gen_cmd->add_option("--scene-description", gen_description,
                                              "text description of the scene");
  gen_cmd->add_option("--retries", gen.retry_limit, "extra calls when prompts are short")
      ->capture_default_str();
  CLI::Option* transcript_opt = gen_cmd->add_option(
      "--transcript-out", gen_transcript, "transcript file (default <out>.transcript.json)");

  std::vector<std::string> report_inputs;
  std::string report_out;
  CLI::App* report = app.add_subcommand("report", "render tables and plots from stored JSON");
  report->add_option("inputs", report_inputs, "report.json / sweep.json files or run dirs")
      ->required();
  CLI::Option* report_out_opt =
      report->add_option("-o,--out", report_out, "directory for CSV and SVG output");

  try {
    app.parse(argc, argv);
    if (*attack) {
      status = vlafreeze::cli::CmdAttack(attack_config, attack_flags.Get(), env);
    } else if (*eval) {
      std::optional<std::filesystem::path> run;
      if (*eval_run_opt) run = eval_run;
      status = vlafreeze::cli::CmdEval(eval_config, run, eval_flags.Get(), env);
    } else if (*sweep) {
      std::vector<vlafreeze::SweepAxis> axes;
      for (const auto& a : sweep_axes) axes.push_back(vlafreeze::cli::ParseAxisFlag(a));
      status = vlafreeze::cli::CmdSweep(sweep_config, axes, sweep_flags.Get(), env);
    } else if (*gen_cmd) {
      gen.out = gen_out;
      if (*stub_opt) gen.stub_transcript = gen_stub;
      if (*scene_opt) gen.scene_png = gen_scene;
      if (*desc_opt) gen.scene_description = gen_description;
      if (*transcript_opt) gen.transcript_out = gen_transcript;
      status = vlafreeze::cli::CmdGenPrompts(gen, env);
    } else if (*report) {
      std::vector<std::filesystem::path> inputs(report_inputs.begin(), report_inputs.end());
      std::optional<std::filesystem::path> out;
      if (*report_out_opt) out = report_out;
      status = vlafreeze::cli::CmdReport(inputs, out, env);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vlafreeze::cli::kExitValidation;
  } catch (const vlafreeze::Error& e) {
    std::cerr << "vlafreeze: " << e.what() << "\n";
    return vlafreeze::cli::ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "vlafreeze: " << e.what() << "\n";
    return vlafreeze::cli::kExitValidation;
  }
  return status;
}
