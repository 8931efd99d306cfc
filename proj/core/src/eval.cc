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

#include "vlafreeze/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <utility>

#include "json.hpp"
#include "vlafreeze/error.h"
#include "vlafreeze/parallel.h"
#include "vlafreeze/rng.h"
#include "vlafreeze/scene.h"
#include "vlafreeze/text.h"

namespace vlafreeze {
namespace {

using nlohmann::ordered_json;

constexpr int kNondeterministicRepeats = 3;

int WorkersFor(const ModelAdapter& adapter, int workers) {
  return adapter.concurrent_reads() ? std::max(1, workers) : 1;
}

std::string OneDecimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <typename T>
T Get(const ordered_json& j, const char* key) {
  if (!j.contains(key)) Fail(ErrorCode::kParse, std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kParse, std::string("bad value for '") + key + "': " + e.what());
  }
}

ordered_json ParseJson(std::string_view text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    Fail(ErrorCode::kParse, std::string("invalid JSON: ") + e.what());
  }
}

bool IsIntegralAxis(std::string_view axis) {
  return axis != "epsilon" && axis != "step_size";
}

}  // namespace

int DefaultDetectionRepeats(const ModelAdapter& adapter) {
  return adapter.deterministic() ? 1 : kNondeterministicRepeats;
}

bool IsParalyzed(const ModelAdapter& adapter, const Image& image,
                 const Prompt& prompt, const FreezeSpec& spec) {
  const int repeats = adapter.deterministic() ? 1 : spec.detection_repeats();
  for (int r = 0; r < repeats; ++r) {
    if (!spec.Contains(adapter.Forward(image, prompt).Argmax())) return false;
  }
  return true;
}

void CheckDisjoint(std::span<const Prompt> reference,
                   std::span<const Prompt> test) {
  std::set<std::string> keys;
  for (const Prompt& p : reference) keys.insert(DedupKey(p.task()));
  for (const Prompt& p : test) {
    if (keys.contains(DedupKey(p.task()))) {
      Fail(ErrorCode::kProtocol,
           "test prompt '" + p.task() + "' is also a reference prompt");
    }
  }
}

std::vector<Prompt> ReferencePrompts(const AttackResult& result) {
  std::vector<Prompt> out = result.initial_prompts;
  out.insert(out.end(), result.final_prompts.begin(), result.final_prompts.end());
  return out;
}

double AttackSuccessRate(const ModelAdapter& adapter, const Image& adversarial,
                         std::span<const Prompt> test,
                         std::span<const Prompt> reference,
                         const FreezeSpec& spec, int workers) {
  CheckDisjoint(reference, test);
  if (test.empty()) Fail(ErrorCode::kValidation, "no test prompts");
  std::vector<char> hit(test.size(), 0);
  ParallelFor(test.size(), WorkersFor(adapter, workers), [&](std::size_t j) {
    hit[j] = IsParalyzed(adapter, adversarial, test[j], spec) ? 1 : 0;
  });
  const auto n = std::count(hit.begin(), hit.end(), 1);
  return static_cast<double>(n) / static_cast<double>(test.size());
}

std::vector<Image> SceneImages(Shape shape, int count, std::uint64_t seed) {
  if (count <= 0) Fail(ErrorCode::kValidation, "image count must be positive");
  std::vector<Image> images;
  images.reserve(count);
  for (int i = 0; i < count; ++i) {
    images.push_back(SyntheticScene(shape, DeriveSeed(seed, 1000 + i)));
  }
  return images;
}

std::vector<Prompt> SampleReferencePrompts(const ModelAdapter& adapter,
                                           const ExperimentSpec& spec) {
  const std::size_t n = spec.kind == AttackKind::kPgdSingle
                            ? 1
                            : static_cast<std::size_t>(spec.config.prompt_count);
  PromptCorpus sampled = SampleCorpusPrompts(spec.reference_corpus, n,
                                             DeriveSeed(spec.config.seed, 0));
  return sampled.ToPrompts(adapter.tokenizer(), spec.prompt_template);
}

std::vector<AttackResult> AttackImages(const ModelAdapter& adapter,
                                       const ExperimentSpec& spec,
                                       const std::vector<Prompt>& reference,
                                       const SynonymLexicon& lexicon,
                                       const FreezeSpec& freeze_spec) {
  spec.config.Validate();
  if (spec.images.empty()) Fail(ErrorCode::kValidation, "no images to attack");
  std::vector<std::optional<AttackResult>> slots(spec.images.size());
  ParallelFor(slots.size(), WorkersFor(adapter, spec.workers), [&](std::size_t i) {
    AttackConfig config = spec.config;
    config.seed = DeriveSeed(spec.config.seed, 1 + i);
    slots[i] = RunAttack(spec.kind, adapter, spec.images[i], config, reference,
                         lexicon, freeze_spec);
  });
  std::vector<AttackResult> out;
  out.reserve(slots.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

TaskEvaluation EvaluateAttacks(const ModelAdapter& adapter,
                               std::span<const AttackResult> attacks,
                               std::span<const Prompt> test,
                               const FreezeSpec& freeze_spec, int workers) {
  if (attacks.empty()) Fail(ErrorCode::kValidation, "no attacks to evaluate");
  if (test.empty()) Fail(ErrorCode::kValidation, "no test prompts");
  for (const AttackResult& a : attacks) CheckDisjoint(ReferencePrompts(a), test);

  TaskEvaluation out;
  const std::size_t cols = test.size();
  std::vector<char> hit(attacks.size() * cols, 0);
  ParallelFor(hit.size(), WorkersFor(adapter, workers), [&](std::size_t k) {
    const AttackResult& a = attacks[k / cols];
    hit[k] = IsParalyzed(adapter, a.adversarial_image.current(), test[k % cols],
                         freeze_spec)
                 ? 1
                 : 0;
  });
  out.paralyzed.assign(attacks.size(), std::vector<bool>(cols));
  for (std::size_t k = 0; k < hit.size(); ++k) {
    out.paralyzed[k / cols][k % cols] = hit[k] != 0;
    out.paralyzed_pairs += hit[k];
  }
  out.asr = static_cast<double>(out.paralyzed_pairs) /
            static_cast<double>(hit.size());
  return out;
}

ExperimentOutcome RunExperiment(const ModelAdapter& adapter,
                                const ExperimentSpec& spec,
                                const SynonymLexicon& lexicon,
                                const FreezeSpec& freeze_spec) {
  spec.config.Validate();
  ExperimentOutcome out;
  out.reference_prompts = SampleReferencePrompts(adapter, spec);
  out.test_prompts =
      spec.test_corpus.ToPrompts(adapter.tokenizer(), spec.prompt_template);
  CheckDisjoint(out.reference_prompts, out.test_prompts);
  out.attacks =
      AttackImages(adapter, spec, out.reference_prompts, lexicon, freeze_spec);
  TaskEvaluation eval = EvaluateAttacks(adapter, out.attacks, out.test_prompts,
                                        freeze_spec, spec.workers);
  out.paralyzed = std::move(eval.paralyzed);
  out.paralyzed_pairs = eval.paralyzed_pairs;
  out.asr = eval.asr;
  return out;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& StandardTaskColumns() {
  static const std::vector<std::string> kColumns = {
      "LIBERO-10", "LIBERO-Goal", "LIBERO-Object", "LIBERO-Spatial"};
  return kColumns;
}

void EvalReport::Validate() const {
  for (const EvalRow& r : rows) {
    if (!(r.asr_percent >= 0.0 && r.asr_percent <= 100.0)) {
      Fail(ErrorCode::kValidation,
           "ASR " + std::to_string(r.asr_percent) + " outside [0, 100] for " +
               r.model + " / " + r.attack_label() + " / " + r.task);
    }
    if (r.n_images < 0 || r.n_test_prompts < 0) {
      Fail(ErrorCode::kValidation, "negative counts in report row " + r.task);
    }
  }
}

std::vector<EvalAggregate> EvalReport::Aggregates() const {
  std::vector<EvalAggregate> out;
  std::vector<double> sums;
  for (const EvalRow& r : rows) {
    const std::string label = r.attack_label();
    auto it = std::find_if(out.begin(), out.end(), [&](const EvalAggregate& a) {
      return a.model == r.model && a.attack == label;
    });
    if (it == out.end()) {
      out.push_back({r.model, label, 0.0, 0});
      sums.push_back(0.0);
      it = out.end() - 1;
    }
    sums[it - out.begin()] += r.asr_percent;
    ++it->rows;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].mean_asr_percent = sums[i] / out[i].rows;
  }
  return out;
}

std::string EvalReport::ToJson(bool with_timestamps) const {
  ordered_json j;
  j["schema"] = kEvalReportSchema;
  ordered_json meta;
  meta["config_hash"] = metadata.config_hash;
  meta["seed"] = metadata.seed;
  meta["asr_denominator"] = metadata.asr_denominator;
  if (with_timestamps) {
    meta["created_at"] = metadata.created_at;
    meta["finished_at"] = metadata.finished_at;
  }
  j["metadata"] = meta;
  j["rows"] = ordered_json::array();
  for (const EvalRow& r : rows) {
    j["rows"].push_back({{"model", r.model},
                         {"attack_kind", AttackKindName(r.attack)},
                         {"prompt_source", PromptSourceKindName(r.source)},
                         {"attack", r.attack_label()},
                         {"task", r.task},
                         {"asr_percent", r.asr_percent},
                         {"n_images", r.n_images},
                         {"n_test_prompts", r.n_test_prompts}});
  }
  j["aggregates"] = ordered_json::array();
  for (const EvalAggregate& a : Aggregates()) {
    j["aggregates"].push_back({{"model", a.model},
                               {"attack", a.attack},
                               {"mean_asr_percent", a.mean_asr_percent},
                               {"rows", a.rows}});
  }
  return j.dump(2) + "\n";
}

EvalReport EvalReport::FromJson(std::string_view json) {
  const ordered_json j = ParseJson(json);
  if (!j.is_object()) Fail(ErrorCode::kParse, "report must be a JSON object");
  const auto schema = Get<std::string>(j, "schema");
  if (schema != kEvalReportSchema) {
    Fail(ErrorCode::kParse, "unsupported report schema '" + schema + "'");
  }
  EvalReport report;
  if (j.contains("metadata")) {
    const ordered_json& m = j.at("metadata");
    report.metadata.config_hash = m.value("config_hash", "");
    report.metadata.seed = m.value("seed", std::uint64_t{0});
    report.metadata.created_at = m.value("created_at", "");
    report.metadata.finished_at = m.value("finished_at", "");
    report.metadata.asr_denominator =
        m.value("asr_denominator", std::string(kAsrDenominator));
  }
  for (const ordered_json& r : Get<ordered_json>(j, "rows")) {
    EvalRow row;
    row.model = Get<std::string>(r, "model");
    const auto kind = ParseAttackKind(Get<std::string>(r, "attack_kind"));
    if (!kind) Fail(ErrorCode::kParse, "unknown attack_kind in report row");
    row.attack = *kind;
    const auto source = ParsePromptSourceKind(Get<std::string>(r, "prompt_source"));
    if (!source) Fail(ErrorCode::kParse, "unknown prompt_source in report row");
    row.source = *source;
    row.task = Get<std::string>(r, "task");
    row.asr_percent = Get<double>(r, "asr_percent");
    row.n_images = r.value("n_images", 0);
    row.n_test_prompts = r.value("n_test_prompts", 0);
    report.rows.push_back(std::move(row));
  }
  report.Validate();
  return report;
}

std::string EvalReport::ToCsv() const {
  std::vector<std::string> tasks = StandardTaskColumns();
  for (const EvalRow& r : rows) {
    if (std::find(tasks.begin(), tasks.end(), r.task) == tasks.end()) {
      tasks.push_back(r.task);
    }
  }
  // Drop standard columns nobody measured, unless nothing extra exists.
  std::set<std::string> used;
  for (const EvalRow& r : rows) used.insert(r.task);
  std::vector<std::string> columns;
  for (const std::string& t : tasks) {
    if (used.contains(t)) columns.push_back(t);
  }
  if (columns.empty()) columns = StandardTaskColumns();

  std::string out = "Models,Attacks";
  for (const std::string& t : columns) out += "," + CsvField(t);
  out += ",Avg.\n";
  for (const EvalAggregate& a : Aggregates()) {
    std::map<std::string, double> by_task;
    for (const EvalRow& r : rows) {
      if (r.model == a.model && r.attack_label() == a.attack) {
        by_task[r.task] = r.asr_percent;
      }
    }
    out += CsvField(a.model) + "," + CsvField(a.attack);
    for (const std::string& t : columns) {
      out += ",";
      if (auto it = by_task.find(t); it != by_task.end()) out += OneDecimal(it->second);
    }
    out += "," + OneDecimal(a.mean_asr_percent) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& ConfigAxisNames() {
  static const std::vector<std::string> kNames = {
      "epsilon",      "step_size",    "outer_steps", "inner_steps",
      "prompt_count", "harden_every", "seed"};
  return kNames;
}

AttackConfig WithAxisValue(AttackConfig config, std::string_view axis,
                           double value) {
  const auto& names = ConfigAxisNames();
  if (std::find(names.begin(), names.end(), axis) == names.end()) {
    Fail(ErrorCode::kValidation, "unknown sweep axis '" + std::string(axis) + "'");
  }
  if (IsIntegralAxis(axis) && (value != std::floor(value) || value < 0)) {
    Fail(ErrorCode::kValidation, "axis '" + std::string(axis) +
                                     "' needs non-negative integers");
  }
  if (axis == "epsilon") config.epsilon = value;
  else if (axis == "step_size") config.step_size = value;
  else if (axis == "outer_steps") config.outer_steps = static_cast<int>(value);
  else if (axis == "inner_steps") config.inner_steps = static_cast<int>(value);
  else if (axis == "prompt_count") config.prompt_count = static_cast<int>(value);
  else if (axis == "harden_every") config.harden_every = static_cast<int>(value);
  else config.seed = static_cast<std::uint64_t>(value);
  return config;
}

SweepGrid::SweepGrid(std::vector<SweepAxis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) Fail(ErrorCode::kValidation, "sweep needs at least one axis");
  std::set<std::string> names;
  std::size_t total = 1;
  for (const SweepAxis& a : axes_) {
    if (a.values.empty()) {
      Fail(ErrorCode::kValidation, "sweep axis '" + a.name + "' has no values");
    }
    if (!names.insert(a.name).second) {
      Fail(ErrorCode::kValidation, "duplicate sweep axis '" + a.name + "'");
    }
    total *= a.values.size();
  }
  cells_.assign(total, std::nullopt);
  errors_.assign(total, "");
}

std::vector<std::size_t> SweepGrid::shape() const {
  std::vector<std::size_t> s;
  for (const SweepAxis& a : axes_) s.push_back(a.values.size());
  return s;
}

std::size_t SweepGrid::FlatIndex(std::span<const std::size_t> index) const {
  if (index.size() != axes_.size()) {
    Fail(ErrorCode::kDimension, "grid index rank mismatch");
  }
  std::size_t flat = 0;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (index[a] >= axes_[a].values.size()) {
      Fail(ErrorCode::kDimension, "grid index out of range on " + axes_[a].name);
    }
    flat = flat * axes_[a].values.size() + index[a];
  }
  return flat;
}

std::vector<std::size_t> SweepGrid::Unflatten(std::size_t flat) const {
  std::vector<std::size_t> index(axes_.size());
  for (std::size_t a = axes_.size(); a-- > 0;) {
    index[a] = flat % axes_[a].values.size();
    flat /= axes_[a].values.size();
  }
  return index;
}

std::vector<double> SweepGrid::Coordinates(std::size_t flat) const {
  const auto index = Unflatten(flat);
  std::vector<double> coords(axes_.size());
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    coords[a] = axes_[a].values[index[a]];
  }
  return coords;
}

void SweepGrid::Set(std::size_t flat, double value) {
  cells_.at(flat) = value;
  errors_.at(flat).clear();
}

void SweepGrid::SetMissing(std::size_t flat, std::string error) {
  cells_.at(flat).reset();
  errors_.at(flat) = std::move(error);
}

std::size_t SweepGrid::missing() const {
  return std::count(cells_.begin(), cells_.end(), std::nullopt);
}

std::string SweepGrid::ToJson() const {
  ordered_json j;
  j["schema"] = "vlafreeze.sweep-grid/1";
  j["axes"] = ordered_json::array();
  for (const SweepAxis& a : axes_) {
    j["axes"].push_back({{"name", a.name}, {"values", a.values}});
  }
  j["shape"] = shape();
  j["asr_percent"] = ordered_json::array();
  j["errors"] = ordered_json::array();
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    j["asr_percent"].push_back(cells_[i] ? ordered_json(*cells_[i]) : ordered_json());
    j["errors"].push_back(errors_[i]);
  }
  return j.dump(2) + "\n";
}

SweepGrid SweepGrid::FromJson(std::string_view json) {
  const ordered_json j = ParseJson(json);
  if (Get<std::string>(j, "schema") != "vlafreeze.sweep-grid/1") {
    Fail(ErrorCode::kParse, "unsupported sweep-grid schema");
  }
  std::vector<SweepAxis> axes;
  for (const ordered_json& a : Get<ordered_json>(j, "axes")) {
    axes.push_back({Get<std::string>(a, "name"),
                    Get<std::vector<double>>(a, "values")});
  }
  SweepGrid grid(std::move(axes));
  const auto values = Get<ordered_json>(j, "asr_percent");
  if (values.size() != grid.size()) {
    Fail(ErrorCode::kParse, "sweep grid has " + std::to_string(values.size()) +
                                " cells, axes imply " + std::to_string(grid.size()));
  }
  const ordered_json errors = j.value("errors", ordered_json::array());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i].is_null()) {
      grid.SetMissing(i, i < errors.size() ? errors[i].get<std::string>() : "");
    } else {
      grid.Set(i, values[i].get<double>());
    }
  }
  return grid;
}

SweepGrid Sweep(std::vector<SweepAxis> axes, const CellRunner& runner,
                const SweepOptions& options) {
  SweepGrid grid(std::move(axes));
  if (grid.size() > options.cell_limit) {
    Fail(ErrorCode::kValidation,
         "sweep has " + std::to_string(grid.size()) + " cells, limit is " +
             std::to_string(options.cell_limit));
  }
  std::vector<std::optional<double>> values(grid.size());
  std::vector<std::string> errors(grid.size());
  ParallelFor(grid.size(), options.workers, [&](std::size_t i) {
    const std::vector<double> coords = grid.Coordinates(i);
    try {
      values[i] = runner(coords);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i]) grid.Set(i, *values[i]);
    else grid.SetMissing(i, errors[i].empty() ? "cell failed" : errors[i]);
  }
  return grid;
}

}  // namespace vlafreeze
