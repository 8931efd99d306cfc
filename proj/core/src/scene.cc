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

#include "vlafreeze/scene.h"

#include <algorithm>
#include <vector>

#include "vlafreeze/rng.h"

namespace vlafreeze {

Image SyntheticScene(Shape shape, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> top(shape.channels);
  std::vector<double> bottom(shape.channels);
  for (int ch = 0; ch < shape.channels; ++ch) {
    top[ch] = rng.Uniform(0.3, 0.7);
    bottom[ch] = rng.Uniform(0.3, 0.7);
  }
  std::vector<double> pixels(shape.size());
  for (int r = 0; r < shape.height; ++r) {
    const double t = shape.height > 1 ? double(r) / (shape.height - 1) : 0.0;
    for (int c = 0; c < shape.width; ++c) {
      for (int ch = 0; ch < shape.channels; ++ch) {
        pixels[(std::size_t(r) * shape.width + c) * shape.channels + ch] =
            (1 - t) * top[ch] + t * bottom[ch];
      }
    }
  }
  const int boxes = 2 + static_cast<int>(rng.Below(3));
  for (int b = 0; b < boxes; ++b) {
    const int h = 1 + static_cast<int>(rng.Below(std::max(1, shape.height / 2)));
    const int w = 1 + static_cast<int>(rng.Below(std::max(1, shape.width / 2)));
    const int r0 = static_cast<int>(rng.Below(shape.height - h + 1));
    const int c0 = static_cast<int>(rng.Below(shape.width - w + 1));
    std::vector<double> colour(shape.channels);
    for (double& v : colour) v = rng.Uniform(0.05, 0.95);
    for (int r = r0; r < r0 + h; ++r) {
      for (int c = c0; c < c0 + w; ++c) {
        for (int ch = 0; ch < shape.channels; ++ch) {
          pixels[(std::size_t(r) * shape.width + c) * shape.channels + ch] =
              colour[ch];
        }
      }
    }
  }
  for (double& v : pixels) v = std::clamp(v, 0.05, 0.95);
  return Image(shape, std::move(pixels));
}

}  // namespace vlafreeze
