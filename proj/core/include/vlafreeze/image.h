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

#ifndef VLAFREEZE_IMAGE_H_
#define VLAFREEZE_IMAGE_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vlafreeze {

struct Shape {
  int height = 0;
  int width = 0;
  int channels = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(height) * width * channels;
  }
  std::string ToString() const;
  friend bool operator==(const Shape&, const Shape&) = default;
};

// Height x width x channels intensities in [0,1], stored row-major with the
// channel index fastest. Immutable once constructed.
class Image {
 public:
  // Throws kValidation on non-positive dimensions, a size mismatch, or any
  // value outside [0,1] (NaN included).
  Image(Shape shape, std::vector<double> pixels);

  static Image Filled(Shape shape, double value);

  const Shape& shape() const { return shape_; }
  std::span<const double> pixels() const { return pixels_; }
  std::size_t size() const { return pixels_.size(); }

  std::size_t Index(int row, int col, int channel) const {
    return (static_cast<std::size_t>(row) * shape_.width + col) *
               shape_.channels +
           channel;
  }
  double at(int row, int col, int channel) const {
    return pixels_[Index(row, col, channel)];
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  Shape shape_;
  std::vector<double> pixels_;
};

// Max elementwise |a - b|. Throws kDimension on shape mismatch.
double LinfDistance(const Image& a, const Image& b);
double LinfDistance(std::span<const double> a, std::span<const double> b);

// Clip onto {r : |r - base|_inf <= epsilon} intersected with [0,1]^d.
// Coordinates that already satisfy both constraints are returned untouched.
std::vector<double> ProjectLinf(std::span<const double> candidate,
                                const Image& base, double epsilon);
Image ProjectLinf(const Image& candidate, const Image& base, double epsilon);

// A clean image and its perturbed counterpart inside the epsilon ball.
class AdversarialImage {
 public:
  // Starts at the clean image.
  AdversarialImage(Image base, double epsilon);
  // Throws kValidation if `current` leaves the ball (beyond 1e-9) or if
  // epsilon is outside (0,1].
  AdversarialImage(Image base, Image current, double epsilon);

  const Image& base() const { return base_; }
  const Image& current() const { return current_; }
  double epsilon() const { return epsilon_; }

  AdversarialImage WithCurrent(Image current) const;
  std::vector<double> Perturbation() const;

  friend bool operator==(const AdversarialImage&,
                         const AdversarialImage&) = default;

 private:
  Image base_;
  Image current_;
  double epsilon_;
};

inline constexpr double kBallTolerance = 1e-9;

}  // namespace vlafreeze

#endif  // VLAFREEZE_IMAGE_H_
