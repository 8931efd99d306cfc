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

#include "vlafreeze/image.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vlafreeze/error.h"

namespace vlafreeze {

std::string Shape::ToString() const {
  std::ostringstream out;
  out << height << "x" << width << "x" << channels;
  return out.str();
}

Image::Image(Shape shape, std::vector<double> pixels)
    : shape_(shape), pixels_(std::move(pixels)) {
  if (shape_.height <= 0 || shape_.width <= 0 || shape_.channels <= 0) {
    Fail(ErrorCode::kValidation,
         "image dimensions must be positive, got " + shape_.ToString());
  }
  if (pixels_.size() != shape_.size()) {
    Fail(ErrorCode::kValidation,
         "image of shape " + shape_.ToString() + " needs " +
             std::to_string(shape_.size()) + " values, got " +
             std::to_string(pixels_.size()));
  }
  for (std::size_t i = 0; i < pixels_.size(); ++i) {
    const double v = pixels_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      std::ostringstream out;
      out << "pixel " << i << " = " << v << " outside [0,1]";
      Fail(ErrorCode::kValidation, out.str());
    }
  }
}

Image Image::Filled(Shape shape, double value) {
  return Image(shape, std::vector<double>(shape.size(), value));
}

double LinfDistance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    Fail(ErrorCode::kDimension, "L-inf distance between arrays of size " +
                                    std::to_string(a.size()) + " and " +
                                    std::to_string(b.size()));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

double LinfDistance(const Image& a, const Image& b) {
  if (a.shape() != b.shape()) {
    Fail(ErrorCode::kDimension, "L-inf distance between shapes " +
                                    a.shape().ToString() + " and " +
                                    b.shape().ToString());
  }
  return LinfDistance(a.pixels(), b.pixels());
}

std::vector<double> ProjectLinf(std::span<const double> candidate,
                                const Image& base, double epsilon) {
  if (candidate.size() != base.size()) {
    Fail(ErrorCode::kDimension,
         "projection candidate has " + std::to_string(candidate.size()) +
             " values, base image " + base.shape().ToString());
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    Fail(ErrorCode::kValidation, "epsilon must lie in (0,1]");
  }
  auto base_pixels = base.pixels();
  std::vector<double> out(candidate.begin(), candidate.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = out[i];
    const double b = base_pixels[i];
    if (std::abs(v - b) <= epsilon && v >= 0.0 && v <= 1.0) continue;
    const double lo = std::max(0.0, b - epsilon);
    const double hi = std::min(1.0, b + epsilon);
    // NaN candidates land on the lower bound rather than propagating.
    out[i] = v > hi ? hi : (v >= lo ? v : lo);
  }
  return out;
}

Image ProjectLinf(const Image& candidate, const Image& base, double epsilon) {
  if (candidate.shape() != base.shape()) {
    Fail(ErrorCode::kDimension, "projection between shapes " +
                                    candidate.shape().ToString() + " and " +
                                    base.shape().ToString());
  }
  return Image(base.shape(), ProjectLinf(candidate.pixels(), base, epsilon));
}

AdversarialImage::AdversarialImage(Image base, double epsilon)
    : AdversarialImage(base, base, epsilon) {}

AdversarialImage::AdversarialImage(Image base, Image current, double epsilon)
    : base_(std::move(base)), current_(std::move(current)), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0 && epsilon_ <= 1.0)) {
    Fail(ErrorCode::kValidation, "epsilon must lie in (0,1]");
  }
  const double distance = LinfDistance(base_, current_);
  if (distance > epsilon_ + kBallTolerance) {
    std::ostringstream out;
    out << "adversarial image is " << distance << " from its base, budget "
        << epsilon_;
    Fail(ErrorCode::kValidation, out.str());
  }
}

AdversarialImage AdversarialImage::WithCurrent(Image current) const {
  return AdversarialImage(base_, std::move(current), epsilon_);
}

std::vector<double> AdversarialImage::Perturbation() const {
  std::vector<double> delta(current_.size());
  auto c = current_.pixels();
  auto b = base_.pixels();
  for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = c[i] - b[i];
  return delta;
}

}  // namespace vlafreeze
