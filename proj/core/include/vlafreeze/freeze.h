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

#ifndef VLAFREEZE_FREEZE_H_
#define VLAFREEZE_FREEZE_H_

#include <span>
#include <vector>

namespace vlafreeze {

// Probabilities over the action-token vocabulary at the first generated
// position. Entries are non-negative and sum to 1 within 1e-9.
class ActionDistribution {
 public:
  explicit ActionDistribution(std::vector<double> probabilities);

  std::span<const double> probabilities() const { return probabilities_; }
  int vocabulary_size() const { return static_cast<int>(probabilities_.size()); }
  double operator[](int id) const { return probabilities_[id]; }

  // Lowest id among the maximal entries.
  int Argmax() const;

  friend bool operator==(const ActionDistribution&,
                         const ActionDistribution&) = default;

 private:
  std::vector<double> probabilities_;
};

inline constexpr double kSoftmaxTolerance = 1e-9;

// The inaction token set and how many consecutive agreeing queries count as
// paralysis.
class FreezeSpec {
 public:
  // Ids are sorted and deduplicated. Throws kValidation on an empty set,
  // negative ids, or detection_repeats < 1.
  explicit FreezeSpec(std::vector<int> freeze_token_ids,
                      int detection_repeats = 1);

  const std::vector<int>& freeze_token_ids() const { return ids_; }
  int detection_repeats() const { return detection_repeats_; }
  bool Contains(int id) const;

  // Throws kValidation if any id falls outside [0, vocabulary_size).
  void CheckVocabulary(int vocabulary_size) const;

  double FreezeMass(const ActionDistribution& dist) const;

 private:
  std::vector<int> ids_;
  int detection_repeats_;
};

inline constexpr double kDefaultLossCeiling = 1e4;

struct FreezeLoss {
  double value = 0.0;
  // True when the freeze mass was exactly zero and `value` is the ceiling.
  bool at_ceiling = false;
};

// -log of the summed probability of the freeze tokens. Lower is closer to
// freezing. Zero mass yields `ceiling` instead of infinity.
FreezeLoss ComputeFreezeLoss(const ActionDistribution& dist,
                             const FreezeSpec& spec,
                             double ceiling = kDefaultLossCeiling);
FreezeLoss FreezeLossFromMass(double freeze_mass,
                              double ceiling = kDefaultLossCeiling);

}  // namespace vlafreeze

#endif  // VLAFREEZE_FREEZE_H_
