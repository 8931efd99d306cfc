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

#ifndef VLAFREEZE_EVAL_H_
#define VLAFREEZE_EVAL_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlafreeze/attack_config.h"
#include "vlafreeze/freeze.h"
#include "vlafreeze/image.h"
#include "vlafreeze/lexicon.h"
#include "vlafreeze/model_adapter.h"
#include "vlafreeze/orchestrator.h"
#include "vlafreeze/prompt.h"
#include "vlafreeze/prompt_forge.h"

namespace vlafreeze {

// Repeat count used when a config leaves it unset: adapters that are not
// deterministic must agree 3 times in a row, deterministic ones once.
int DefaultDetectionRepeats(const ModelAdapter& adapter);

// True iff the most likely action token (lowest id on ties, so a uniform
// distribution picks token 0) is a freeze token. Non-deterministic adapters
// are queried spec.detection_repeats() times and must freeze every time.
bool IsParalyzed(const ModelAdapter& adapter, const Image& image,
                 const Prompt& prompt, const FreezeSpec& spec);

// Throws kProtocol if any test task equals a reference task, comparing
// normalized, case-folded text.
void CheckDisjoint(std::span<const Prompt> reference,
                   std::span<const Prompt> test);

// Reference tasks an attack saw: the initial prompts and every hardened
// variant, so a test prompt cannot collide with either.
std::vector<Prompt> ReferencePrompts(const AttackResult& result);

// Fraction of `test` prompts paralyzed by `adversarial`. Enforces
// disjointness from `reference` first.
double AttackSuccessRate(const ModelAdapter& adapter, const Image& adversarial,
                         std::span<const Prompt> test,
                         std::span<const Prompt> reference,
                         const FreezeSpec& spec, int workers = 1);

// ---------------------------------------------------------------------------
// One task's measurement: attack every image, then count paralyzed
// (image, test prompt) pairs.

struct ExperimentSpec {
  AttackKind kind = AttackKind::kFreezeVla;
  AttackConfig config;
  PromptTemplate prompt_template = DefaultTemplate();
  std::vector<Image> images;
  // config.prompt_count prompts are sampled from here (one for pgd-single).
  PromptCorpus reference_corpus{"reference", {"pick up the object"},
                                CorpusSource::kUser};
  PromptCorpus test_corpus{"test", {"stay still"}, CorpusSource::kUser};
  int workers = 1;
};

struct ExperimentOutcome {
  std::vector<Prompt> reference_prompts;
  std::vector<Prompt> test_prompts;
  std::vector<AttackResult> attacks;  // one per image
  // paralyzed[i][j]: image i under test prompt j.
  std::vector<std::vector<bool>> paralyzed;
  std::size_t paralyzed_pairs = 0;
  double asr = 0.0;  // fraction of pairs

  double asr_percent() const { return 100.0 * asr; }
};

// Reference prompts for an experiment: config.prompt_count entries (one for
// pgd-single) drawn with SampleCorpusPrompts(corpus, n,
// DeriveSeed(config.seed, 0)).
std::vector<Prompt> SampleReferencePrompts(const ModelAdapter& adapter,
                                           const ExperimentSpec& spec);

// Attacks every image of `spec` against `reference`; image i uses seed
// DeriveSeed(config.seed, 1 + i). Images run on up to spec.workers threads.
std::vector<AttackResult> AttackImages(const ModelAdapter& adapter,
                                       const ExperimentSpec& spec,
                                       const std::vector<Prompt>& reference,
                                       const SynonymLexicon& lexicon,
                                       const FreezeSpec& freeze_spec);

struct TaskEvaluation {
  std::vector<std::vector<bool>> paralyzed;  // [image][test prompt]
  std::size_t paralyzed_pairs = 0;
  double asr = 0.0;

  double asr_percent() const { return 100.0 * asr; }
};

// Paralysis of every (adversarial image, test prompt) pair. Throws
// kProtocol if a test prompt matches any attack's reference prompts.
TaskEvaluation EvaluateAttacks(const ModelAdapter& adapter,
                               std::span<const AttackResult> attacks,
                               std::span<const Prompt> test,
                               const FreezeSpec& freeze_spec, int workers = 1);

// SampleReferencePrompts, AttackImages and EvaluateAttacks on
// spec.test_corpus in one call.
ExperimentOutcome RunExperiment(const ModelAdapter& adapter,
                                const ExperimentSpec& spec,
                                const SynonymLexicon& lexicon,
                                const FreezeSpec& freeze_spec);

// `count` SyntheticScene images keyed off `seed`.
std::vector<Image> SceneImages(Shape shape, int count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Reports.

inline constexpr std::string_view kEvalReportSchema = "vlafreeze.eval-report/1";
inline constexpr std::string_view kAsrDenominator = "image x test-prompt pairs";

struct EvalRow {
  std::string model;
  AttackKind attack = AttackKind::kFreezeVla;
  PromptSourceKind source = PromptSourceKind::kCorpusRandom;
  std::string task;
  double asr_percent = 0.0;
  int n_images = 0;
  int n_test_prompts = 0;

  std::string attack_label() const { return AttackDisplayName(attack, source); }
  friend bool operator==(const EvalRow&, const EvalRow&) = default;
};

struct EvalAggregate {
  std::string model;
  std::string attack;  // display label
  double mean_asr_percent = 0.0;
  int rows = 0;
};

struct EvalMetadata {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string created_at;   // excluded from deterministic output
  std::string finished_at;  // excluded from deterministic output
  std::string asr_denominator{kAsrDenominator};

  friend bool operator==(const EvalMetadata&, const EvalMetadata&) = default;
};

// Column order for the CSV table; other task names follow in order of
// first appearance.
const std::vector<std::string>& StandardTaskColumns();

struct EvalReport {
  std::vector<EvalRow> rows;
  EvalMetadata metadata;

  // Throws kValidation for ASR outside [0, 100] or negative counts.
  void Validate() const;

  // Mean ASR per (model, attack label), in order of first appearance.
  std::vector<EvalAggregate> Aggregates() const;

  // Pretty JSON. Timestamps are written only when `with_timestamps`.
  std::string ToJson(bool with_timestamps = true) const;
  // Throws kParse on malformed input.
  static EvalReport FromJson(std::string_view json);

  // "Models,Attacks,<tasks...>,Avg." with values to one decimal. A blank
  // cell means the task was not measured for that row.
  std::string ToCsv() const;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// ---------------------------------------------------------------------------
// Sweeps.

struct SweepAxis {
  std::string name;
  std::vector<double> values;

  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

// Axes an AttackConfig sweep understands.
//   epsilon, step_size: real; outer_steps, inner_steps, prompt_count,
//   harden_every, seed: integral values.
const std::vector<std::string>& ConfigAxisNames();

// `config` with `axis` set to `value`; kValidation on an unknown axis or a
// non-integral value for an integral axis.
AttackConfig WithAxisValue(AttackConfig config, std::string_view axis,
                           double value);

class SweepGrid {
 public:
  SweepGrid() = default;
  // Throws kValidation on no axes, an empty axis, or duplicate names.
  explicit SweepGrid(std::vector<SweepAxis> axes);

  const std::vector<SweepAxis>& axes() const { return axes_; }
  std::size_t size() const { return cells_.size(); }
  std::vector<std::size_t> shape() const;

  // Row-major flattening, last axis fastest.
  std::size_t FlatIndex(std::span<const std::size_t> index) const;
  std::vector<std::size_t> Unflatten(std::size_t flat) const;
  std::vector<double> Coordinates(std::size_t flat) const;

  const std::optional<double>& cell(std::size_t flat) const {
    return cells_.at(flat);
  }
  const std::string& error(std::size_t flat) const { return errors_.at(flat); }
  void Set(std::size_t flat, double value);
  void SetMissing(std::size_t flat, std::string error);
  std::size_t missing() const;

  std::string ToJson() const;
  static SweepGrid FromJson(std::string_view json);

  friend bool operator==(const SweepGrid&, const SweepGrid&) = default;

 private:
  std::vector<SweepAxis> axes_;
  std::vector<std::optional<double>> cells_;
  std::vector<std::string> errors_;
};

struct SweepOptions {
  std::size_t cell_limit = 512;
  int workers = 1;
};

// Returns ASR (percent) for one grid point, given its coordinates in axis
// order.
using CellRunner = std::function<double(std::span<const double> coordinates)>;

// Fills every cell with `runner`. A cell whose runner throws is recorded as
// missing together with the message. Throws kValidation before running
// anything if the grid exceeds options.cell_limit.
SweepGrid Sweep(std::vector<SweepAxis> axes, const CellRunner& runner,
                const SweepOptions& options = {});

}  // namespace vlafreeze

#endif  // VLAFREEZE_EVAL_H_
