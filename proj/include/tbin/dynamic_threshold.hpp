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

// Region-based dynamic thresholding.
//
// The image is tiled into regions; every region whose histogram passes the
// bimodality check gets its own minimum-error threshold. Regions that fail
// borrow an inverse-distance-weighted mean from finalized neighbors, and the
// per-region values are then bilinearly interpolated between region centers
// to give a threshold for every pixel.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "tbin/errors.hpp"
#include "tbin/global_threshold.hpp"
#include "tbin/histogram.hpp"
#include "tbin/image.hpp"
#include "tbin/mixture.hpp"
#include "tbin/parallel.hpp"

namespace tbin {

inline constexpr std::size_t kMinRegionSize = 8;

enum class RegionStatus { pending, valid, interpolated };

struct RegionRecord {
  Rect bounds;
  Histogram histogram;
  RegionStatus status = RegionStatus::pending;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  /// Fit error measured during validation; NaN if the fit failed.
  double fit_error = std::numeric_limits<double>::quiet_NaN();
};

class RegionGrid {
 public:
  RegionGrid(std::size_t image_width, std::size_t image_height,
             std::size_t region_width, std::size_t region_height)
      : image_width_(image_width),
        image_height_(image_height),
        region_width_(region_width),
        region_height_(region_height),
        cols_((image_width + region_width - 1) / region_width),
        rows_((image_height + region_height - 1) / region_height),
        regions_(cols_ * rows_) {
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        const std::size_t x = c * region_width;
        const std::size_t y = r * region_height;
        at(c, r).bounds = {x, y, std::min(region_width, image_width - x),
                           std::min(region_height, image_height - y)};
      }
    }
  }

  std::size_t image_width() const noexcept { return image_width_; }
  std::size_t image_height() const noexcept { return image_height_; }
  std::size_t region_width() const noexcept { return region_width_; }
  std::size_t region_height() const noexcept { return region_height_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return regions_.size(); }

  RegionRecord& at(std::size_t col, std::size_t row) {
    return regions_[row * cols_ + col];
  }
  const RegionRecord& at(std::size_t col, std::size_t row) const {
    return regions_[row * cols_ + col];
  }
  std::vector<RegionRecord>& regions() noexcept { return regions_; }
  const std::vector<RegionRecord>& regions() const noexcept { return regions_; }

  /// Pixel-space center of region column `col` (clipped regions included).
  double center_x(std::size_t col) const {
    const auto& b = at(col, 0).bounds;
    return static_cast<double>(b.x) + (static_cast<double>(b.width) - 1.0) / 2.0;
  }
  double center_y(std::size_t row) const {
    const auto& b = at(0, row).bounds;
    return static_cast<double>(b.y) + (static_cast<double>(b.height) - 1.0) / 2.0;
  }

  std::size_t count(RegionStatus s) const noexcept {
    return static_cast<std::size_t>(std::count_if(
        regions_.begin(), regions_.end(),
        [s](const RegionRecord& r) { return r.status == s; }));
  }

 private:
  std::size_t image_width_;
  std::size_t image_height_;
  std::size_t region_width_;
  std::size_t region_height_;
  std::size_t cols_;
  std::size_t rows_;
  std::vector<RegionRecord> regions_;
};

/// Tiles the image and builds each region's histogram. Edge regions are
/// clipped. Region sides must lie in [min(8, image side), image side], so a
/// one-row line-scan image takes regions of height 1.
inline RegionGrid partition(const GrayImage& img, std::size_t region_width,
                            std::size_t region_height) {
  const auto check = [](std::size_t side, std::size_t image_side,
                        const char* name) {
    const std::size_t lo = std::min(kMinRegionSize, image_side);
    if (side < lo || side > image_side) {
      throw InvalidRegionSizeError(std::string("region ") + name + " " +
                                   std::to_string(side) + " outside [" +
                                   std::to_string(lo) + ", " +
                                   std::to_string(image_side) + "]");
    }
  };
  check(region_width, img.width(), "width");
  check(region_height, img.height(), "height");
  RegionGrid grid(img.width(), img.height(), region_width, region_height);
  for (auto& r : grid.regions()) r.histogram = build_spatial(img, r.bounds);
  return grid;
}

/// Validates every region independently; accepted regions become valid with
/// their own threshold, the rest stay pending.
inline RegionGrid estimate_region_thresholds(RegionGrid grid,
                                             double tolerance = kDefaultFitTolerance,
                                             unsigned threads = 1) {
  auto& regions = grid.regions();
  parallel_for(regions.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& r = regions[i];
      const auto v = validate_bimodal(r.histogram, tolerance);
      r.fit_error = v.fit_error;
      if (v.accepted) {
        r.threshold = solve_optimal(*v.mixture).threshold;
        r.status = RegionStatus::valid;
      } else {
        r.threshold = std::numeric_limits<double>::quiet_NaN();
        r.status = RegionStatus::pending;
      }
    }
  });
  return grid;
}

/// Fills pending regions in synchronous wavefronts: each pass assigns every
/// pending region that touches a finalized one (8-neighborhood) the
/// inverse-distance-weighted mean of those neighbors. Values written during a
/// pass are only visible to the next pass, so the result does not depend on
/// scan order.
inline RegionGrid fill_invalid_regions(RegionGrid grid) {
  if (grid.count(RegionStatus::valid) == 0) {
    throw NoValidRegionError("no region passed the bimodality check");
  }
  const auto cols = static_cast<std::ptrdiff_t>(grid.cols());
  const auto rows = static_cast<std::ptrdiff_t>(grid.rows());
  for (;;) {
    std::vector<std::pair<std::size_t, double>> updates;
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      for (std::ptrdiff_t c = 0; c < cols; ++c) {
        if (grid.at(c, r).status != RegionStatus::pending) continue;
        double weighted = 0.0;
        double weights = 0.0;
        for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
          for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const auto nc = c + dc;
            const auto nr = r + dr;
            if (nc < 0 || nr < 0 || nc >= cols || nr >= rows) continue;
            const auto& n = grid.at(nc, nr);
            if (n.status == RegionStatus::pending) continue;
            const double w = 1.0 / std::hypot(static_cast<double>(dc),
                                              static_cast<double>(dr));
            weighted += w * n.threshold;
            weights += w;
          }
        }
        if (weights > 0.0) {
          updates.emplace_back(static_cast<std::size_t>(r * cols + c),
                               weighted / weights);
        }
      }
    }
    if (updates.empty()) break;
    for (const auto& [index, value] : updates) {
      auto& region = grid.regions()[index];
      region.threshold = value;
      region.status = RegionStatus::interpolated;
    }
  }
  return grid;
}

namespace detail {

struct Bracket {
  std::size_t lo;
  std::size_t hi;
  double t;
};

// Locates `v` between consecutive knots, clamping outside the first/last.
template <typename CenterFn>
Bracket bracket(double v, std::size_t n, CenterFn center) {
  if (n == 1 || v <= center(0)) return {0, 0, 0.0};
  if (v >= center(n - 1)) return {n - 1, n - 1, 0.0};
  std::size_t lo = 0;
  std::size_t hi = n - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (center(mid) <= v ? lo : hi) = mid;
  }
  return {lo, hi, (v - center(lo)) / (center(hi) - center(lo))};
}

}  // namespace detail

/// Threshold at an arbitrary pixel-space point: bilinear between the four
/// surrounding region centers, clamped to the outer centers.
inline double threshold_at(const RegionGrid& grid, double x, double y) {
  const auto bx = detail::bracket(x, grid.cols(),
                                  [&](std::size_t c) { return grid.center_x(c); });
  const auto by = detail::bracket(y, grid.rows(),
                                  [&](std::size_t r) { return grid.center_y(r); });
  const double t00 = grid.at(bx.lo, by.lo).threshold;
  const double t10 = grid.at(bx.hi, by.lo).threshold;
  const double t01 = grid.at(bx.lo, by.hi).threshold;
  const double t11 = grid.at(bx.hi, by.hi).threshold;
  const double top = t00 + bx.t * (t10 - t00);
  const double bottom = t01 + bx.t * (t11 - t01);
  return top + by.t * (bottom - top);
}

inline ThresholdMap interpolate_pixel_map(const RegionGrid& grid) {
  for (const auto& r : grid.regions()) {
    if (r.status == RegionStatus::pending || !std::isfinite(r.threshold)) {
      throw NoValidRegionError("region grid has unfinalized regions");
    }
  }
  ThresholdMap map(grid.image_width(), grid.image_height());
  for (std::size_t y = 0; y < map.height(); ++y) {
    for (std::size_t x = 0; x < map.width(); ++x) {
      map(x, y) = std::clamp(
          threshold_at(grid, static_cast<double>(x), static_cast<double>(y)),
          0.0, 255.0);
    }
  }
  return map;
}

struct RegionSize {
  std::size_t width = 64;
  std::size_t height = 64;
};

/// Region size used when none is given: 64x64, or 128x1 for line-scan images.
inline RegionSize default_region_size(const GrayImage& img) {
  if (img.height() == 1) return {std::min<std::size_t>(128, img.width()), 1};
  return {std::min<std::size_t>(64, img.width()),
          std::min<std::size_t>(64, img.height())};
}

struct DynamicBinarization {
  BinaryImage image;
  ThresholdMap thresholds;
  RegionGrid grid;
};

inline DynamicBinarization dynamic_binarize(const GrayImage& img, RegionSize size,
                                            double tolerance = kDefaultFitTolerance,
                                            unsigned threads = 1) {
  auto grid = fill_invalid_regions(estimate_region_thresholds(
      partition(img, size.width, size.height), tolerance, threads));
  auto map = interpolate_pixel_map(grid);
  auto bin = binarize(img, map);
  return {std::move(bin), std::move(map), std::move(grid)};
}

}  // namespace tbin
