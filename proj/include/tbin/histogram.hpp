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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "tbin/errors.hpp"
#include "tbin/frame_stack.hpp"
#include "tbin/image.hpp"

namespace tbin {

inline constexpr std::size_t kLevels = 256;

/// Raw 256-bin intensity counts. Bin i holds level i; normalization is
/// derived on demand so histograms built from different sample counts stay
/// comparable.
class Histogram {
 public:
  using Counts = std::array<std::uint64_t, kLevels>;

  Histogram() { counts_.fill(0); }
  explicit Histogram(const Counts& counts) : counts_(counts) {
    for (auto c : counts_) total_ += c;
  }

  void add(std::uint8_t level, std::uint64_t n = 1) noexcept {
    counts_[level] += n;
    total_ += n;
  }

  std::uint64_t operator[](std::size_t level) const { return counts_[level]; }
  const Counts& counts() const noexcept { return counts_; }
  std::uint64_t total() const noexcept { return total_; }

  std::size_t occupied_bins() const noexcept {
    std::size_t n = 0;
    for (auto c : counts_) n += c != 0;
    return n;
  }

  Histogram& operator+=(const Histogram& other) noexcept {
    for (std::size_t i = 0; i < kLevels; ++i) counts_[i] += other.counts_[i];
    total_ += other.total_;
    return *this;
  }

  /// Every bin multiplied by `k`.
  Histogram scaled(std::uint64_t k) const noexcept {
    Histogram h;
    for (std::size_t i = 0; i < kLevels; ++i) h.counts_[i] = counts_[i] * k;
    h.total_ = total_ * k;
    return h;
  }

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  Counts counts_;
  std::uint64_t total_ = 0;
};

using NormalizedHistogram = std::array<double, kLevels>;

/// Inclusive bin interval [first, last].
struct BinRange {
  std::size_t first = 0;
  std::size_t last = kLevels - 1;
};

struct ClassMoments {
  double mean = 0.0;
  double variance = 0.0;
  /// Share of the histogram total falling inside the range.
  double mass = 0.0;
};

/// Histogram of the whole image, or of `region` when given.
inline Histogram build_spatial(const GrayImage& image,
                               std::optional<Rect> region = std::nullopt) {
  const Rect r = region.value_or(Rect{0, 0, image.width(), image.height()});
  if (!fits_inside(r, image)) {
    throw BoundsError("region " + std::to_string(r.width) + "x" +
                      std::to_string(r.height) + "+" + std::to_string(r.x) +
                      "+" + std::to_string(r.y) + " outside " +
                      std::to_string(image.width()) + "x" +
                      std::to_string(image.height()) + " image");
  }
  Histogram::Counts counts{};
  for (std::size_t y = r.y; y < r.y + r.height; ++y) {
    for (std::size_t x = r.x; x < r.x + r.width; ++x) ++counts[image(x, y)];
  }
  return Histogram(counts);
}

/// Histogram of one pixel's levels across every frame of the stack.
inline Histogram build_temporal(const FrameStack& stack, std::size_t x,
                                std::size_t y) {
  if (stack.empty()) throw InsufficientDataError("frame stack is empty");
  if (!stack.contains(x, y)) {
    throw BoundsError("pixel (" + std::to_string(x) + "," + std::to_string(y) +
                      ") outside frame geometry");
  }
  Histogram::Counts counts{};
  for (const auto& frame : stack.frames()) ++counts[frame(x, y)];
  return Histogram(counts);
}

inline NormalizedHistogram normalize(const Histogram& h) {
  if (h.total() == 0) throw EmptyHistogramError("histogram has no samples");
  NormalizedHistogram out{};
  const double total = static_cast<double>(h.total());
  for (std::size_t i = 0; i < kLevels; ++i) {
    out[i] = static_cast<double>(h[i]) / total;
  }
  return out;
}

/// Population moments of the bins in `range`, using bin indices as values.
inline ClassMoments mean_and_variance(const Histogram& h, BinRange range = {}) {
  if (range.first > range.last || range.last >= kLevels) {
    throw BoundsError("bin range [" + std::to_string(range.first) + "," +
                      std::to_string(range.last) + "] invalid");
  }
  std::uint64_t n = 0;
  double sum = 0.0;
  for (std::size_t i = range.first; i <= range.last; ++i) {
    n += h[i];
    sum += static_cast<double>(h[i]) * static_cast<double>(i);
  }
  if (n == 0) {
    throw EmptyClassError("no samples in bins [" + std::to_string(range.first) +
                          "," + std::to_string(range.last) + "]");
  }
  const double count = static_cast<double>(n);
  const double mean = sum / count;
  double ss = 0.0;
  for (std::size_t i = range.first; i <= range.last; ++i) {
    const double d = static_cast<double>(i) - mean;
    ss += static_cast<double>(h[i]) * d * d;
  }
  return {mean, ss / count, count / static_cast<double>(h.total())};
}

}  // namespace tbin
