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

#include "cli/commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli/artifacts.h"
#include "cli/plots.h"
#include "json.hpp"
#include "vlafreeze/llm_http.h"
#include "vlafreeze/rng.h"
#include "vlafreeze/scene.h"
#include "vlafreeze/text.h"

namespace vlafreeze::cli {
namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kManifestSchema = "vlafreeze.run-manifest/1";

std::string ImageDirName(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "image_%03zu", i);
  return buf;
}

std::string Slug(const std::string& name) {
  std::string out;
  for (char c : AsciiLower(name)) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += c;
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "task" : out;
}

// Plain task list, one per line, in order; duplicates kept.
std::string FormatTaskList(const std::vector<Prompt>& prompts,
                           const std::string& config_hash,
                           const std::string& title) {
  std::string out = "# " + title + "\n# config_hash: " + config_hash + "\n";
  for (const auto& p : prompts) out += p.task() + "\n";
  return out;
}

std::vector<std::string> ReadTaskList(const fs::path& path) {
  std::istringstream in(ReadFileBytes(path));
  std::vector<std::string> tasks;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    tasks.push_back(line);
  }
  return tasks;
}

ordered_json SubstitutionsJson(const std::vector<SubstitutionRecord>& records) {
  ordered_json out = ordered_json::array();
  for (const auto& r : records) {
    out.push_back({
        {"outer_iteration", r.outer_iteration},
        {"round", r.round},
        {"prompt_index", r.prompt_index},
        {"word_index", r.word_index},
        {"old_phrase", r.old_phrase},
        {"new_phrase", r.new_phrase},
        {"probability_before", r.probability_before},
        {"probability_after", r.probability_after},
        {"loss_before", r.loss_before},
        {"loss_after", r.loss_after},
        {"accepted", r.accepted},
    });
  }
  return out;
}

ordered_json TraceJson(const std::vector<OuterIterationRecord>& trace) {
  ordered_json out = ordered_json::array();
  for (const auto& t : trace) {
    out.push_back({
        {"iteration", t.iteration},
        {"proposals", t.proposals},
        {"accepted", t.accepted},
        {"loss_before", t.step.loss_before},
        {"loss_after", t.step.loss_after},
        {"linf_from_base", t.step.linf_from_base},
        {"mean_freeze_probability_after", t.step.mean_freeze_probability_after},
        {"prompt_losses_after", t.step.prompt_losses_after},
    });
  }
  return out;
}

std::string Dump(const ordered_json& j) { return j.dump(2) + "\n"; }

struct FileEntry {
  std::string path;
  std::size_t bytes;
  std::string digest;
};

// Every file under `root` except the manifest, sorted by relative path.
std::vector<FileEntry> ListFiles(const fs::path& root) {
  std::vector<FileEntry> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), root).generic_string();
    if (rel == "manifest.json") continue;
    const std::string bytes = ReadFileBytes(e.path());
    files.push_back({rel, bytes.size(), HexDigest(Fnv1a64(bytes))});
  }
  std::sort(files.begin(), files.end(),
            [](const FileEntry& a, const FileEntry& b) { return a.path < b.path; });
  return files;
}

void WriteManifest(const fs::path& root, const std::string& command,
                   const std::string& config_hash, const std::string& status,
                   const std::string& error, const std::string& created_at,
                   const std::string& finished_at, const ordered_json& extra) {
  ordered_json m;
  m["schema"] = kManifestSchema;
  m["command"] = command;
  m["status"] = status;
  m["config_hash"] = config_hash;
  m["created_at"] = created_at;
  m["finished_at"] = finished_at;
  if (!error.empty()) m["error"] = error;
  for (const auto& [k, v] : extra.items()) m[k] = v;
  ordered_json files = ordered_json::array();
  for (const auto& f : ListFiles(root)) {
    files.push_back({{"path", f.path}, {"bytes", f.bytes}, {"fnv1a64", f.digest}});
  }
  m["files"] = files;
  WriteFileBytes(root / "manifest.json", Dump(m));
}

std::map<std::string, std::string> PngLabels(const std::string& config_hash,
                                             const std::string& raw_file) {
  return {{"Comment", "lossy 8-bit export for viewing; exact float64 values in " +
                          raw_file},
          {"vlafreeze:config_hash", config_hash}};
}

void WriteAttackFiles(const fs::path& dir, const AttackResult& result,
                      const std::string& config_hash, bool partial) {
  const Image& clean = result.adversarial_image.base();
  const Image& adv = result.adversarial_image.current();
  const std::vector<double> delta = result.adversarial_image.Perturbation();
  WriteNpy(dir / "clean.npy", clean);
  WriteNpy(dir / "adversarial.npy", adv);
  WriteNpy(dir / "perturbation.npy", delta, clean.shape());
  WritePng(dir / "clean.png", clean, PngLabels(config_hash, "clean.npy"));
  WritePng(dir / "adversarial.png", adv, PngLabels(config_hash, "adversarial.npy"));
  WriteFileBytes(dir / "final_prompts.txt",
                 FormatTaskList(result.final_prompts, config_hash,
                                "prompts after hardening, index-aligned with "
                                "prompts/reference.txt"));
  ordered_json subs;
  subs["config_hash"] = config_hash;
  subs["substitutions"] = SubstitutionsJson(result.substitutions);
  WriteFileBytes(dir / "substitutions.json", Dump(subs));
  ordered_json trace;
  trace["config_hash"] = config_hash;
  trace["attack"] = AttackKindName(result.kind);
  trace["seed"] = result.config.seed;
  trace["partial"] = partial;
  trace["linf"] = LinfDistance(clean, adv);
  trace["epsilon"] = result.adversarial_image.epsilon();
  trace["iterations"] = TraceJson(result.loss_trace);
  WriteFileBytes(dir / "trace.json", Dump(trace));
}

void WriteReport(const fs::path& dir, const EvalReport& report, bool atomic) {
  auto write = atomic ? WriteFileAtomic : WriteFileBytes;
  write(dir / "report.json", report.ToJson());
  write(dir / "report.csv", report.ToCsv());
}

std::string ReadOriginal(const RunConfig& config) {
  return config.source.empty() ? std::string() : ReadFileBytes(config.source);
}

// Config loading shared by the run commands: parse, apply overrides,
// revalidate, then check the referenced files.
RunConfig PrepareConfig(const fs::path& path, const ConfigOverrides& overrides) {
  if (!fs::exists(path)) {
    Fail(ErrorCode::kMissingArtifact, "missing artifact(s):\n  " + path.string());
  }
  RunConfig config = LoadRunConfig(path);
  overrides.ApplyTo(config);
  try {
    config.Validate();
  } catch (const Error& ex) {
    Fail(ex.code(), path.string() + ": command-line override: " + ex.what());
  }
  const auto missing = MissingPaths(config.InputFiles());
  if (!missing.empty()) {
    std::string msg = "missing artifact(s) referenced by " + path.string() + ":";
    for (const auto& m : missing) msg += "\n  " + m.string();
    Fail(ErrorCode::kMissingArtifact, msg);
  }
  return config;
}

template <typename Body>
int Guard(const CommandEnv& env, const char* command, Body&& body) {
  try {
    return body();
  } catch (const Error& ex) {
    env.Err() << "vlafreeze " << command << ": " << ErrorCodeName(ex.code())
              << " error: " << ex.what() << "\n";
    return ExitCodeFor(ex.code());
  } catch (const std::exception& ex) {
    env.Err() << "vlafreeze " << command << ": " << ex.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation:
    case ErrorCode::kParse:
    case ErrorCode::kDimension:
    case ErrorCode::kTokenizer:
    case ErrorCode::kProtocol:
      return kExitValidation;
    case ErrorCode::kMissingArtifact:
      return kExitMissingArtifact;
    case ErrorCode::kAdapter:
    case ErrorCode::kNumerical:
    case ErrorCode::kGeneration:
    case ErrorCode::kIo:
      return kExitRuntime;
  }
  return kExitRuntime;
}

std::ostream& CommandEnv::Out() const { return out ? *out : std::cout; }
std::ostream& CommandEnv::Err() const { return err ? *err : std::cerr; }
std::string CommandEnv::Now() const { return clock ? clock() : UtcNow(); }

void ConfigOverrides::ApplyTo(RunConfig& config) const {
  if (outer_steps) config.attack.outer_steps = *outer_steps;
  if (inner_steps) config.attack.inner_steps = *inner_steps;
  if (step_size) config.attack.step_size = *step_size;
  if (epsilon) config.attack.epsilon = *epsilon;
  if (prompt_count) config.attack.prompt_count = *prompt_count;
  if (seed) config.attack.seed = *seed;
  if (workers) config.workers = *workers;
  if (output_dir) config.output_dir = *output_dir;
}

LoadedInputs LoadInputs(const RunConfig& config) {
  LoadedInputs in;
  const CorpusSource ref_source =
      config.attack.prompt_source == PromptSourceKind::kLlmGenerated
          ? CorpusSource::kLlmGenerated
          : CorpusSource::kUser;
  in.reference = LoadCorpus(config.reference_corpus, ref_source);
  if (!config.lexicon.empty()) in.lexicon = SynonymLexicon::Load(config.lexicon);
  for (const auto& task : config.tasks) {
    const CorpusSource source =
        ParseCorpusSource(AsciiLower(task.name)).value_or(CorpusSource::kUser);
    PromptCorpus corpus = LoadCorpus(task.corpus, source);
    in.tests.emplace_back(task.name, corpus.entries(), source);
  }
  return in;
}

FreezeSpec MakeFreezeSpec(const RunConfig& config, const ModelAdapter& adapter) {
  FreezeSpec spec(config.freeze_token_ids,
                  config.detection_repeats.value_or(DefaultDetectionRepeats(adapter)));
  spec.CheckVocabulary(adapter.action_vocabulary_size());
  return spec;
}

EvalReport EvaluateRun(const RunConfig& config, const ModelAdapter& adapter,
                       const std::vector<PromptCorpus>& tests,
                       const std::vector<AttackResult>& attacks,
                       const std::string& config_hash) {
  const FreezeSpec spec = MakeFreezeSpec(config, adapter);
  EvalReport report;
  report.metadata.config_hash = config_hash;
  report.metadata.seed = config.attack.seed;
  for (const auto& corpus : tests) {
    const auto prompts = corpus.ToPrompts(adapter.tokenizer(), config.prompt_template());
    const TaskEvaluation e =
        EvaluateAttacks(adapter, attacks, prompts, spec, config.workers);
    EvalRow row;
    row.model = AdapterDisplayName(config.adapter.name);
    row.attack = config.attack_kind;
    row.source = config.attack.prompt_source;
    row.task = corpus.name();
    row.asr_percent = e.asr_percent();
    row.n_images = static_cast<int>(attacks.size());
    row.n_test_prompts = static_cast<int>(prompts.size());
    report.rows.push_back(std::move(row));
  }
  report.Validate();
  return report;
}

double MeanAsrPercent(const EvalReport& report) {
  if (report.rows.empty()) Fail(ErrorCode::kValidation, "report has no rows");
  double sum = 0.0;
  for (const auto& row : report.rows) sum += row.asr_percent;
  return sum / static_cast<double>(report.rows.size());
}

void ExecuteRun(const RunConfig& config, const ModelAdapter& adapter,
                const LoadedInputs& inputs, const CommandEnv& env,
                RunOutputs& out) {
  out.config_hash = ConfigHash(config);
  adapter.CheckShape(config.adapter.input_shape);
  const FreezeSpec spec = MakeFreezeSpec(config, adapter);

  out.images = SceneImages(config.adapter.input_shape, config.images,
                           config.scene_seed());
  ExperimentSpec experiment;
  experiment.kind = config.attack_kind;
  experiment.config = config.attack;
  experiment.prompt_template = config.prompt_template();
  experiment.reference_corpus = inputs.reference;
  out.reference = SampleReferencePrompts(adapter, experiment);
  for (const auto& test : inputs.tests) {
    CheckDisjoint(out.reference,
                  test.ToPrompts(adapter.tokenizer(), config.prompt_template()));
  }

  for (std::size_t i = 0; i < out.images.size(); ++i) {
    AttackConfig attack = config.attack;
    attack.seed = DeriveSeed(config.attack.seed, 1 + i);
    try {
      out.attacks.push_back(RunAttack(config.attack_kind, adapter, out.images[i],
                                      attack, out.reference, inputs.lexicon, spec,
                                      AttackOptions{config.workers}));
    } catch (const AttackError& ex) {
      out.partial = ex.partial();
      throw;
    }
    env.Err() << "  attacked " << ImageDirName(i) << " ("
              << AttackKindName(config.attack_kind) << ", linf "
              << LinfDistance(out.images[i],
                              out.attacks.back().adversarial_image.current())
              << ")\n";
  }
  out.report = EvaluateRun(config, adapter, inputs.tests, out.attacks, out.config_hash);
}

// ---------------------------------------------------------------------------

int CmdAttack(const fs::path& config_path, const ConfigOverrides& overrides,
              const CommandEnv& env) {
  return Guard(env, "attack", [&]() -> int {
    const RunConfig config = PrepareConfig(config_path, overrides);
    if (config.output_dir.empty()) {
      Fail(ErrorCode::kValidation, "output_dir: required (config or --output)");
    }
    const LoadedInputs inputs = LoadInputs(config);
    const std::string created_at = env.Now();
    const std::unique_ptr<ModelAdapter> adapter = env.make_adapter(config.adapter);

    RunOutputs run;
    std::optional<Error> failure;
    try {
      ExecuteRun(config, *adapter, inputs, env, run);
    } catch (const Error& ex) {
      // Setup failures leave nothing worth keeping; attack failures do.
      if (run.attacks.empty() && !run.partial) throw;
      failure = ex;
    }

    StagedDirectory dir(config.output_dir);
    const std::string hash = run.config_hash;
    WriteFileBytes(dir / "config.yaml",
                   "# config_hash: " + hash + "\n" + ReadOriginal(config));
    ordered_json resolved;
    resolved["config_hash"] = hash;
    resolved["config"] = ordered_json::parse(CanonicalConfigJson(config));
    WriteFileBytes(dir / "config.json", Dump(resolved));
    if (!run.reference.empty()) {
      WriteFileBytes(dir / "prompts" / "reference.txt",
                     FormatTaskList(run.reference, hash, "reference prompts"));
    }
    for (const auto& test : inputs.tests) {
      WriteFileBytes(dir / "prompts" / "test" / (Slug(test.name()) + ".txt"),
                     "# config_hash: " + hash + "\n" + FormatCorpus(test));
    }
    ordered_json timing = ordered_json::array();
    for (std::size_t i = 0; i < run.attacks.size(); ++i) {
      WriteAttackFiles(dir / "images" / ImageDirName(i), run.attacks[i], hash, false);
      timing.push_back(run.attacks[i].wall_clock_seconds);
    }
    if (run.partial) {
      WriteAttackFiles(dir / "images" / ImageDirName(run.attacks.size()),
                       *run.partial, hash, true);
    }
    const std::string finished_at = env.Now();
    if (!failure) {
      EvalReport report = run.report;
      report.metadata.created_at = created_at;
      report.metadata.finished_at = finished_at;
      WriteReport(dir.staging(), report, false);
    } else {
      WriteFileBytes(dir / "error.txt", std::string(failure->what()) + "\n");
    }
    WriteManifest(dir.staging(), "attack", hash, failure ? "failed" : "complete",
                  failure ? failure->what() : "", created_at, finished_at,
                  {{"images_completed", run.attacks.size()},
                   {"attack_seconds", timing}});
    dir.Commit();

    if (failure) {
      env.Err() << "vlafreeze attack: " << ErrorCodeName(failure->code())
                << " error: " << failure->what() << "\n  partial results in "
                << config.output_dir.string() << "\n";
      return ExitCodeFor(failure->code());
    }
    env.Out() << run.report.ToCsv();
    env.Err() << "wrote " << config.output_dir.string() << " (config " << hash
              << ")\n";
    return kExitOk;
  });
}

int CmdEval(const fs::path& config_path, const std::optional<fs::path>& run_dir,
            const ConfigOverrides& overrides, const CommandEnv& env) {
  return Guard(env, "eval", [&]() -> int {
    const RunConfig config = PrepareConfig(config_path, overrides);
    const fs::path root = run_dir.value_or(config.output_dir);
    if (root.empty()) Fail(ErrorCode::kValidation, "no run directory given");
    if (config.tasks.empty()) {
      Fail(ErrorCode::kValidation, "evaluation.tasks: eval needs at least one task");
    }

    std::vector<fs::path> needed = {root / "manifest.json",
                                    root / "prompts" / "reference.txt"};
    for (int i = 0; i < config.images; ++i) {
      const fs::path d = root / "images" / ImageDirName(i);
      needed.push_back(d / "clean.npy");
      needed.push_back(d / "adversarial.npy");
      needed.push_back(d / "final_prompts.txt");
    }
    const auto missing = MissingPaths(needed);
    if (!missing.empty()) {
      std::string msg = "missing artifact(s):";
      for (const auto& m : missing) msg += "\n  " + m.string();
      Fail(ErrorCode::kMissingArtifact, msg);
    }

    const std::string hash = ConfigHash(config);
    ordered_json manifest;
    try {
      manifest = ordered_json::parse(ReadFileBytes(root / "manifest.json"));
    } catch (const nlohmann::json::exception& ex) {
      Fail(ErrorCode::kParse, (root / "manifest.json").string() + ": " + ex.what());
    }
    const std::string run_hash = manifest.value("config_hash", "");
    if (run_hash != hash) {
      Fail(ErrorCode::kValidation, root.string() + " was produced by config " +
                                       run_hash + ", not " + hash);
    }
    if (manifest.value("status", "") != "complete") {
      Fail(ErrorCode::kMissingArtifact,
           root.string() + " holds an incomplete run (status " +
               manifest.value("status", "?") + ")");
    }

    const LoadedInputs inputs = LoadInputs(config);
    const std::unique_ptr<ModelAdapter> adapter = env.make_adapter(config.adapter);
    const std::string created_at = env.Now();
    auto to_prompts = [&](const std::vector<std::string>& tasks) {
      std::vector<Prompt> prompts;
      for (const auto& t : tasks) {
        prompts.push_back(adapter->MakePrompt(config.prompt_template(), t));
      }
      return prompts;
    };
    const auto reference = to_prompts(ReadTaskList(root / "prompts" / "reference.txt"));
    std::vector<AttackResult> attacks;
    for (int i = 0; i < config.images; ++i) {
      const fs::path d = root / "images" / ImageDirName(i);
      AttackResult r{AdversarialImage(ReadNpyImage(d / "clean.npy"),
                                      ReadNpyImage(d / "adversarial.npy"),
                                      config.attack.epsilon),
                     reference,
                     to_prompts(ReadTaskList(d / "final_prompts.txt")),
                     {},
                     {},
                     config.attack,
                     config.attack_kind,
                     0.0};
      attacks.push_back(std::move(r));
    }
    EvalReport report = EvaluateRun(config, *adapter, inputs.tests, attacks, hash);
    report.metadata.created_at = created_at;
    report.metadata.finished_at = env.Now();
    std::error_code ec;
    fs::create_directories(root / "eval", ec);
    WriteReport(root / "eval", report, true);
    env.Out() << report.ToCsv();
    return kExitOk;
  });
}

int CmdSweep(const fs::path& config_path, const std::vector<SweepAxis>& flag_axes,
             const ConfigOverrides& overrides, const CommandEnv& env) {
  return Guard(env, "sweep", [&]() -> int {
    const RunConfig config = PrepareConfig(config_path, overrides);
    const std::vector<SweepAxis> axes = flag_axes.empty() ? config.sweep_axes : flag_axes;
    if (axes.empty()) {
      Fail(ErrorCode::kValidation, "sweep.axes: no axes in config or on the command line");
    }
    if (config.tasks.empty()) {
      Fail(ErrorCode::kValidation, "evaluation.tasks: sweep needs at least one task");
    }
    if (config.output_dir.empty()) {
      Fail(ErrorCode::kValidation, "output_dir: required (config or --output)");
    }
    // Validate every value up front so a typo fails before any cell runs.
    for (const auto& axis : axes) {
      for (double v : axis.values) (void)WithAxisValue(config.attack, axis.name, v);
    }
    const SweepGrid layout(axes);
    if (layout.size() > config.cell_limit) {
      Fail(ErrorCode::kValidation, "sweep has " + std::to_string(layout.size()) +
                                       " cells, limit is " +
                                       std::to_string(config.cell_limit));
    }

    const LoadedInputs inputs = LoadInputs(config);
    const std::unique_ptr<ModelAdapter> adapter = env.make_adapter(config.adapter);
    const std::string base_hash = ConfigHash(config);
    const std::string created_at = env.Now();
    StagedDirectory dir(config.output_dir);
    std::vector<std::string> cell_hashes(layout.size());

    auto runner = [&](std::span<const double> coords) -> double {
      std::vector<std::size_t> index(coords.size());
      RunConfig cell = config;
      cell.sweep_axes.clear();
      for (std::size_t a = 0; a < coords.size(); ++a) {
        const auto& values = axes[a].values;
        index[a] = static_cast<std::size_t>(
            std::find(values.begin(), values.end(), coords[a]) - values.begin());
        cell.attack = WithAxisValue(cell.attack, axes[a].name, coords[a]);
      }
      const std::size_t flat = layout.FlatIndex(index);
      const fs::path cell_dir = dir / "cells" / ("cell_" + std::to_string(flat));
      try {
        cell.Validate();
        RunOutputs run;
        CommandEnv quiet = env;
        std::ostringstream sink;
        quiet.err = &sink;
        ExecuteRun(cell, *adapter, inputs, quiet, run);
        cell_hashes[flat] = run.config_hash;
        EvalReport report = run.report;
        report.metadata.created_at = created_at;
        report.metadata.finished_at = env.Now();
        WriteReport(cell_dir, report, false);
        return MeanAsrPercent(report);
      } catch (const Error& ex) {
        WriteFileBytes(cell_dir / "error.txt", std::string(ex.what()) + "\n");
        throw;
      }
    };
    const SweepGrid grid = Sweep(axes, runner, {config.cell_limit, 1});

    ordered_json doc = ordered_json::parse(grid.ToJson());
    doc["config_hash"] = base_hash;
    ordered_json cells = ordered_json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      cells.push_back({{"index", i},
                       {"coordinates", grid.Coordinates(i)},
                       {"config_hash", cell_hashes[i]},
                       {"report", "cells/cell_" + std::to_string(i) + "/report.json"}});
    }
    doc["cells"] = cells;
    WriteFileBytes(dir / "sweep.json", Dump(doc));
    WriteFileBytes(dir / "sweep.csv", SweepGridCsv(grid));
    if (axes.size() <= 2) {
      WriteFileBytes(dir / "sweep.svg",
                     RenderSweepGrid(grid, AttackDisplayName(config.attack_kind,
                                                             config.attack.prompt_source) +
                                               " on " +
                                               AdapterDisplayName(config.adapter.name)));
    }
    WriteManifest(dir.staging(), "sweep", base_hash,
                  grid.missing() == 0 ? "complete" : "incomplete", "", created_at,
                  env.Now(), {{"cells", grid.size()}, {"missing_cells", grid.missing()}});
    dir.Commit();

    env.Out() << SweepGridCsv(grid);
    if (grid.missing() > 0) {
      env.Err() << "vlafreeze sweep: " << grid.missing() << " of " << grid.size()
                << " cell(s) failed:\n";
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.cell(i)) env.Err() << "  cell_" << i << ": " << grid.error(i) << "\n";
      }
      return kExitRuntime;
    }
    return kExitOk;
  });
}

int CmdGenPrompts(const GenPromptsOptions& options, const CommandEnv& env) {
  return Guard(env, "gen-prompts", [&]() -> int {
    if (options.out.empty()) Fail(ErrorCode::kValidation, "--out is required");
    std::vector<fs::path> needed;
    if (options.stub_transcript) needed.push_back(*options.stub_transcript);
    if (options.scene_png) needed.push_back(*options.scene_png);
    const auto missing = MissingPaths(needed);
    if (!missing.empty()) {
      std::string msg = "missing artifact(s):";
      for (const auto& m : missing) msg += "\n  " + m.string();
      Fail(ErrorCode::kMissingArtifact, msg);
    }

    LlmGenerationRequest request = LlmGenerationRequest::ForCount(options.count);
    request.retry_limit = options.retry_limit;
    if (options.scene_png) request.scene_png = ReadFileBytes(*options.scene_png);
    request.scene_description = options.scene_description;
    request.Validate();

    std::unique_ptr<LlmService> service;
    if (options.stub_transcript) {
      service = std::make_unique<ReplayLlmService>(ReplayLlmService::FromTranscript(
          GenerationTranscript::FromJson(ReadFileBytes(*options.stub_transcript))));
    } else {
      if (options.endpoint.empty()) {
        Fail(ErrorCode::kValidation, "either --endpoint or --stub-transcript is required");
      }
      HttpLlmOptions http;
      http.endpoint = options.endpoint;
      http.model = options.model;
      http.api_key_env = options.api_key_env;
      service = std::make_unique<HttpLlmService>(http);
    }

    const fs::path transcript_path =
        options.transcript_out.value_or(fs::path(options.out.string() + ".transcript.json"));
    GenerationTranscript transcript;
    try {
      const PromptCorpus corpus = GenerateReferencePrompts(*service, request, &transcript);
      WriteFileAtomic(options.out, FormatCorpus(PromptCorpus(
                                       options.out.stem().string(), corpus.entries(),
                                       CorpusSource::kLlmGenerated)));
      WriteFileAtomic(transcript_path, transcript.ToJson());
      env.Out() << FormatCorpus(corpus);
      return kExitOk;
    } catch (const GenerationError& ex) {
      WriteFileAtomic(transcript_path, transcript.ToJson());
      std::string partial = "# partial: " + std::string(ex.what()) + "\n";
      for (const auto& p : ex.partial()) partial += p + "\n";
      WriteFileAtomic(fs::path(options.out.string() + ".partial"), partial);
      throw;
    }
  });
}

int CmdReport(const std::vector<fs::path>& inputs,
              const std::optional<fs::path>& out_dir, const CommandEnv& env) {
  return Guard(env, "report", [&]() -> int {
    if (inputs.empty()) Fail(ErrorCode::kValidation, "no inputs given");
    struct Input {
      fs::path file;
      std::string stem;
    };
    std::vector<Input> resolved;
    std::vector<fs::path> missing;
    for (const auto& in : inputs) {
      if (fs::is_directory(in)) {
        const fs::path name = in.filename().empty() ? in.parent_path().filename()
                                                    : in.filename();
        if (fs::exists(in / "report.json")) {
          resolved.push_back({in / "report.json", name.string()});
        } else if (fs::exists(in / "sweep.json")) {
          resolved.push_back({in / "sweep.json", name.string()});
        } else {
          missing.push_back(in / "report.json");
          missing.push_back(in / "sweep.json");
        }
      } else if (fs::exists(in)) {
        resolved.push_back({in, in.stem().string()});
      } else {
        missing.push_back(in);
      }
    }
    if (!missing.empty()) {
      std::string msg = "missing artifact(s):";
      for (const auto& m : missing) msg += "\n  " + m.string();
      Fail(ErrorCode::kMissingArtifact, msg);
    }

    struct Rendered {
      std::string stem, csv, svg;
    };
    std::vector<Rendered> outputs;
    for (const auto& in : resolved) {
      const std::string text = ReadFileBytes(in.file);
      std::string schema;
      try {
        schema = ordered_json::parse(text).value("schema", "");
      } catch (const nlohmann::json::exception& ex) {
        Fail(ErrorCode::kParse, in.file.string() + ": " + ex.what());
      }
      Rendered r{in.stem, "", ""};
      if (schema == kEvalReportSchema) {
        const EvalReport report = EvalReport::FromJson(text);
        report.Validate();
        r.csv = report.ToCsv();
      } else if (schema == "vlafreeze.sweep-grid/1") {
        const SweepGrid grid = SweepGrid::FromJson(text);
        r.csv = SweepGridCsv(grid);
        if (grid.axes().size() <= 2) r.svg = RenderSweepGrid(grid, in.stem);
      } else {
        Fail(ErrorCode::kParse,
             in.file.string() + ": unknown schema '" + schema + "'");
      }
      outputs.push_back(std::move(r));
    }

    if (!out_dir) {
      for (const auto& r : outputs) {
        if (outputs.size() > 1) env.Out() << "# " << r.stem << "\n";
        env.Out() << r.csv;
      }
      return kExitOk;
    }
    std::error_code ec;
    fs::create_directories(*out_dir, ec);
    for (const auto& r : outputs) {
      WriteFileAtomic(*out_dir / (r.stem + ".csv"), r.csv);
      if (!r.svg.empty()) WriteFileAtomic(*out_dir / (r.stem + ".svg"), r.svg);
      env.Err() << "wrote " << (*out_dir / (r.stem + ".csv")).string() << "\n";
    }
    return kExitOk;
  });
}

SweepAxis ParseAxisFlag(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    Fail(ErrorCode::kValidation, "--axis expects name=v1,v2,..., got '" + text + "'");
  }
  SweepAxis axis{text.substr(0, eq), {}};
  const auto& known = ConfigAxisNames();
  if (std::find(known.begin(), known.end(), axis.name) == known.end()) {
    Fail(ErrorCode::kValidation, "--axis: unknown axis '" + axis.name + "'");
  }
  std::istringstream in(text.substr(eq + 1));
  for (std::string part; std::getline(in, part, ',');) {
    part = Trim(part);
    double value = 0.0;
    try {
      const auto slash = part.find('/');
      std::size_t used = 0;
      if (slash == std::string::npos) {
        value = std::stod(part, &used);
        if (used != part.size()) throw std::invalid_argument(part);
      } else {
        const std::string num = part.substr(0, slash), den = part.substr(slash + 1);
        value = std::stod(num, &used);
        if (used != num.size()) throw std::invalid_argument(part);
        const double d = std::stod(den, &used);
        if (used != den.size() || d == 0.0) throw std::invalid_argument(part);
        value /= d;
      }
    } catch (const std::exception&) {
      Fail(ErrorCode::kValidation, "--axis " + axis.name + ": bad value '" + part + "'");
    }
    axis.values.push_back(value);
  }
  if (axis.values.empty()) {
    Fail(ErrorCode::kValidation, "--axis " + axis.name + ": no values");
  }
  return axis;
}

}  // namespace vlafreeze::cli
