// Copyright 2026 The tbin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tbin/errors.hpp"

namespace tbin {

/// Row-major 2-D array of samples. A linear (line-scan) image has height 1.
///
/// A default-constructed raster is empty (0x0); every sized raster has
/// width >= 1 and height >= 1. `Tag` keeps gray images, binary images and
/// threshold surfaces from being mixed up.
template <typename T, typename Tag>
class Raster {
 public:
  using value_type = T;

  Raster() = default;

  Raster(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height) {
    check_geometry(width, height);
    data_.assign(width * height, fill);
  }

  Raster(std::size_t width, std::size_t height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_geometry(width, height);
    if (data_.size() != width * height) {
      throw GeometryError("pixel buffer holds " + std::to_string(data_.size()) +
                          " values, geometry needs " +
                          std::to_string(width * height));
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  const T& operator()(std::size_t x, std::size_t y) const {
    return data_[y * width_ + x];
  }

  T& at(std::size_t x, std::size_t y) {
    check_point(x, y);
    return data_[y * width_ + x];
  }
  const T& at(std::size_t x, std::size_t y) const {
    check_point(x, y);
    return data_[y * width_ + x];
  }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  bool contains(std::size_t x, std::size_t y) const noexcept {
    return x < width_ && y < height_;
  }

  template <typename OtherT, typename OtherTag>
  bool same_geometry(const Raster<OtherT, OtherTag>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static void check_geometry(std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) {
      throw GeometryError("image geometry " + std::to_string(width) + "x" +
                          std::to_string(height) + " is empty");
    }
  }

  void check_point(std::size_t x, std::size_t y) const {
    if (!contains(x, y)) {
      throw BoundsError("pixel (" + std::to_string(x) + "," +
                        std::to_string(y) + ") outside " +
                        std::to_string(width_) + "x" + std::to_string(height_));
    }
  }

  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> data_;
};

struct GrayTag;
struct BinaryTag;
struct ThresholdTag;
struct ErrorTag;

/// Intensity levels f(x, y) in [0, 255].
using GrayImage = Raster<std::uint8_t, GrayTag>;

/// g(x, y) in {0, 1}; 1 marks object pixels.
using BinaryImage = Raster<std::uint8_t, BinaryTag>;

/// Per-pixel real threshold surface T(x, y), values in [0, 255].
using ThresholdMap = Raster<double, ThresholdTag>;

/// Per-pixel expected misclassification probability.
using ErrorMap = Raster<double, ErrorTag>;

/// Axis-aligned pixel rectangle [x, x + width) x [y, y + height).
struct Rect {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t width = 0;
  std::size_t height = 0;

  std::size_t area() const noexcept { return width * height; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

template <typename T, typename Tag>
bool fits_inside(const Rect& r, const Raster<T, Tag>& img) noexcept {
  return r.width > 0 && r.height > 0 && r.x < img.width() &&
         r.y < img.height() && r.width <= img.width() - r.x &&
         r.height <= img.height() - r.y;
}

/// Fraction of pixels where the two binary images disagree.
inline double disagreement_rate(const BinaryImage& a, const BinaryImage& b) {
  if (!a.same_geometry(b)) throw GeometryError("binary images differ in size");
  std::size_t differ = 0;
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) differ += pa[i] != pb[i];
  return pa.empty() ? 0.0
                    : static_cast<double>(differ) / static_cast<double>(pa.size());
}

}  // namespace tbin
