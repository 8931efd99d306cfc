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

#ifndef VLAFREEZE_SCENE_H_
#define VLAFREEZE_SCENE_H_

#include <cstdint>

#include "vlafreeze/image.h"

namespace vlafreeze {

// Seeded tabletop-like test image: a vertical shading gradient with a few
// axis-aligned coloured boxes. Pixels stay inside [0.05, 0.95] so small
// perturbations in either direction remain feasible.
Image SyntheticScene(Shape shape, std::uint64_t seed);

}  // namespace vlafreeze

#endif  // VLAFREEZE_SCENE_H_
