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

#ifndef VLAFREEZE_PARALLEL_H_
#define VLAFREEZE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace vlafreeze {

// Runs body(i) for i in [0, n) on up to `workers` threads. Results must be
// written to per-index slots; the first exception thrown (lowest index
// among those observed) is rethrown after all workers join.
void ParallelFor(std::size_t n, int workers,
                 const std::function<void(std::size_t)>& body);

}  // namespace vlafreeze

#endif  // VLAFREEZE_PARALLEL_H_
