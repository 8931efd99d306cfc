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

#ifndef VLAFREEZE_RNG_H_
#define VLAFREEZE_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace vlafreeze {

// Deterministic generator used everywhere a seed appears.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distributions are not portable across library
// implementations, so the bounded-integer and real draws are defined here:
//
//   Below(n)   rejection sampling on the top bits of one 64-bit draw
//   Uniform()  (draw >> 11) * 2^-53, a double in [0, 1)
//   Normal()   Box-Muller on two Uniform() draws (uses libm log/cos)
//
// Integer-only consumers (Below, Shuffle, SampleIndices) are therefore
// bit-identical across platforms; Normal() is identical wherever libm is.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, n). Requires n > 0.
  std::uint64_t Below(std::uint64_t n);

  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  double Normal();

  // Fisher-Yates, iterating from the back.
  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  // k distinct indices from [0, n) in draw order (partial Fisher-Yates).
  std::vector<std::size_t> SampleIndices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a base seed with a stream index so sub-generators do not overlap.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace vlafreeze

#endif  // VLAFREEZE_RNG_H_
