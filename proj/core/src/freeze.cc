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

#include "vlafreeze/freeze.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vlafreeze/error.h"

namespace vlafreeze {

ActionDistribution::ActionDistribution(std::vector<double> probabilities)
    : probabilities_(std::move(probabilities)) {
  if (probabilities_.empty()) {
    Fail(ErrorCode::kValidation, "action distribution is empty");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probabilities_.size(); ++i) {
    const double p = probabilities_[i];
    if (!(p >= 0.0) || !std::isfinite(p)) {
      std::ostringstream out;
      out << "action probability " << i << " = " << p << " is invalid";
      Fail(ErrorCode::kNumerical, out.str());
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kSoftmaxTolerance) {
    std::ostringstream out;
    out.precision(17);
    out << "action probabilities sum to " << total;
    Fail(ErrorCode::kNumerical, out.str());
  }
}

int ActionDistribution::Argmax() const {
  return static_cast<int>(
      std::max_element(probabilities_.begin(), probabilities_.end()) -
      probabilities_.begin());
}

FreezeSpec::FreezeSpec(std::vector<int> freeze_token_ids, int detection_repeats)
    : ids_(std::move(freeze_token_ids)), detection_repeats_(detection_repeats) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  if (ids_.empty()) {
    Fail(ErrorCode::kValidation, "freeze token set is empty");
  }
  if (ids_.front() < 0) {
    Fail(ErrorCode::kValidation, "freeze token ids must be non-negative");
  }
  if (detection_repeats_ < 1) {
    Fail(ErrorCode::kValidation, "detection_repeats must be at least 1");
  }
}

bool FreezeSpec::Contains(int id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

void FreezeSpec::CheckVocabulary(int vocabulary_size) const {
  if (ids_.back() >= vocabulary_size) {
    Fail(ErrorCode::kValidation,
         "freeze token " + std::to_string(ids_.back()) +
             " outside action vocabulary of " +
             std::to_string(vocabulary_size));
  }
}

double FreezeSpec::FreezeMass(const ActionDistribution& dist) const {
  CheckVocabulary(dist.vocabulary_size());
  double mass = 0.0;
  for (int id : ids_) mass += dist[id];
  return mass;
}

FreezeLoss FreezeLossFromMass(double freeze_mass, double ceiling) {
  if (freeze_mass <= 0.0) return FreezeLoss{ceiling, true};
  return FreezeLoss{-std::log(std::min(freeze_mass, 1.0)), false};
}

FreezeLoss ComputeFreezeLoss(const ActionDistribution& dist,
                             const FreezeSpec& spec, double ceiling) {
  return FreezeLossFromMass(spec.FreezeMass(dist), ceiling);
}

}  // namespace vlafreeze
