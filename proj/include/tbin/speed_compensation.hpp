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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tbin/errors.hpp"
#include "tbin/image.hpp"
#include "tbin/speed_levels.hpp"
#include "tbin/temporal_threshold.hpp"

namespace tbin {

inline constexpr std::size_t kSpeedTableSize = 256;

/// Integer threshold band t and its crossing speed table, backed by a
/// piecewise-linear threshold(V) through the calibration points.
///
/// entries()[t] is the speed at which threshold(V) crosses t + 0.5, or empty
/// ("never") when that level is outside the calibrated threshold range.
/// Outside [min_speed, max_speed] the threshold is clamped.
class SpeedThresholdTable {
 public:
  using Entries = std::array<std::optional<double>, kSpeedTableSize>;

  SpeedThresholdTable(std::vector<SpeedCalibrationPoint> sorted_points,
                      Entries entries)
      : points_(std::move(sorted_points)), entries_(entries) {
    for (std::size_t t = kSpeedTableSize; t-- > 0;) {
      if (entries_[t]) breakpoints_.push_back({*entries_[t], t});
    }
  }

  const Entries& entries() const noexcept { return entries_; }
  const std::vector<SpeedCalibrationPoint>& points() const noexcept {
    return points_;
  }
  double min_speed() const noexcept { return points_.front().speed; }
  double max_speed() const noexcept { return points_.back().speed; }
  bool in_range(double v) const noexcept {
    return v >= min_speed() && v <= max_speed();
  }

  /// Piecewise-linear threshold, exact at the calibration speeds.
  double threshold_at(double v) const noexcept {
    if (v <= points_.front().speed) return points_.front().threshold;
    if (v >= points_.back().speed) return points_.back().threshold;
    auto it = std::upper_bound(
        points_.begin(), points_.end(), v,
        [](double s, const SpeedCalibrationPoint& p) { return s < p.speed; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (v == lo.speed) return lo.threshold;
    const double f = (v - lo.speed) / (hi.speed - lo.speed);
    return lo.threshold + f * (hi.threshold - lo.threshold);
  }

  /// Integer band index at speed v: binary search over the crossing speeds,
  /// which ascend as the band descends.
  std::size_t band_at(double v) const noexcept {
    if (breakpoints_.empty()) {
      return static_cast<std::size_t>(std::lround(threshold_at(v)));
    }
    auto it = std::upper_bound(
        breakpoints_.begin(), breakpoints_.end(), v,
        [](double s, const Breakpoint& b) { return s < b.speed; });
    if (it == breakpoints_.begin()) return breakpoints_.front().band + 1;
    return (it - 1)->band;
  }

  friend bool operator==(const SpeedThresholdTable& a,
                         const SpeedThresholdTable& b) {
    return a.points_ == b.points_ && a.entries_ == b.entries_;
  }

 private:
  struct Breakpoint {
    double speed;
    std::size_t band;
  };

  std::vector<SpeedCalibrationPoint> points_;
  Entries entries_;
  std::vector<Breakpoint> breakpoints_;
};

/// Builds the crossing table from at least two calibration points with
/// distinct speeds and thresholds that never rise with speed. Row numbers in
/// errors are 1-based positions in `points` as given.
inline SpeedThresholdTable build_table(std::vector<SpeedCalibrationPoint> points) {
  if (points.size() < 2) {
    throw InsufficientCalibrationError("speed table needs at least 2 points, got " +
                                       std::to_string(points.size()));
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.speed > 0.0) || !(p.threshold > 0.0 && p.threshold < 255.0)) {
      throw InsufficientCalibrationError(
          "calibration row " + std::to_string(i + 1) +
          " needs speed > 0 and threshold in (0, 255)");
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].speed < points[b].speed;
  });
  std::vector<std::size_t> bad_rows;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& prev = points[order[k - 1]];
    const auto& cur = points[order[k]];
    if (cur.speed == prev.speed) {
      throw InsufficientCalibrationError("calibration rows " +
                                         std::to_string(order[k - 1] + 1) + " and " +
                                         std::to_string(order[k] + 1) +
                                         " share speed " + std::to_string(cur.speed));
    }
    if (cur.threshold > prev.threshold) bad_rows.push_back(order[k] + 1);
  }
  if (!bad_rows.empty()) {
    std::string rows;
    for (auto r : bad_rows) rows += (rows.empty() ? "" : ", ") + std::to_string(r);
    throw MonotonicityError("threshold rises with speed at row(s) " + rows,
                            std::move(bad_rows));
  }
  std::vector<SpeedCalibrationPoint> sorted;
  sorted.reserve(points.size());
  for (auto i : order) sorted.push_back(points[i]);

  SpeedThresholdTable::Entries entries{};
  for (std::size_t t = 0; t < kSpeedTableSize; ++t) {
    const double level = static_cast<double>(t) + 0.5;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      const auto& lo = sorted[i];
      const auto& hi = sorted[i + 1];
      if (level > lo.threshold || level < hi.threshold) continue;
      if (level == lo.threshold || lo.threshold == hi.threshold) {
        entries[t] = lo.speed;
      } else {
        entries[t] = lo.speed + (lo.threshold - level) /
                                    (lo.threshold - hi.threshold) *
                                    (hi.speed - lo.speed);
      }
      break;
    }
  }
  return {std::move(sorted), entries};
}

struct SpeedLookup {
  std::size_t band = 0;
  double threshold = 0.0;
};

/// Threshold for conveyor speed v: the integer band from the crossing
/// table, refined to the interpolated real value. Clamps outside the
/// calibrated range.
inline SpeedLookup lookup_band(const SpeedThresholdTable& table, double v) {
  if (!(v > 0.0)) throw std::invalid_argument("speed must be positive");
  return {table.band_at(v), table.threshold_at(v)};
}

inline double lookup(const SpeedThresholdTable& table, double v) {
  return lookup_band(table, v).threshold;
}

/// lookup(v) / lookup(calibration speed).
inline double speed_ratio(const SpeedThresholdTable& table, double v,
                          double calibration_speed) {
  if (!table.in_range(calibration_speed)) {
    throw InsufficientCalibrationError(
        "calibration speed " + std::to_string(calibration_speed) +
        " outside table range [" + std::to_string(table.min_speed()) + ", " +
        std::to_string(table.max_speed()) + "]");
  }
  const double r = lookup(table, v) / lookup(table, calibration_speed);
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw TableCorruptionError("speed ratio " + std::to_string(r) +
                               " is not positive");
  }
  return r;
}

/// Temporal thresholds rescaled from the calibration speed to speed v.
/// Values are clamped to [0, 255].
inline ThresholdMap scale_threshold_map(const TemporalCalibration& calib,
                                        const SpeedThresholdTable& table,
                                        double v) {
  if (!calib.calibration_speed) {
    throw InsufficientCalibrationError("calibration has no acquisition speed");
  }
  const double r = speed_ratio(table, v, *calib.calibration_speed);
  ThresholdMap out = calib.threshold_map;
  for (auto& t : out.pixels()) t = std::clamp(t * r, 0.0, 255.0);
  return out;
}

/// Same calibration with thresholds moved to speed v; error and flag maps
/// are carried over unchanged.
inline TemporalCalibration at_speed(const TemporalCalibration& calib,
                                    const SpeedThresholdTable& table, double v) {
  TemporalCalibration out = calib;
  out.threshold_map = scale_threshold_map(calib, table, v);
  out.calibration_speed = v;
  return out;
}

struct LevelRatio {
  std::string_view column;
  double mean = 0.0;
  /// Largest |ratio - mean| across the points.
  double max_deviation = 0.0;
};

struct LevelSpeedModel {
  /// Each level column (and the threshold) divided by Object Min+.
  std::vector<LevelRatio> ratios;
  /// Knots of the monotone piecewise-linear threshold(V), ascending speed.
  std::vector<SpeedCalibrationPoint> curve;

  const LevelRatio& ratio(std::string_view column) const {
    for (const auto& r : ratios) {
      if (r.column == column) return r;
    }
    throw std::out_of_range("no level column " + std::string(column));
  }
};

/// Calibration diagnostics: how each measured level scales with the
/// Object Min+ level across speeds.
inline LevelSpeedModel fit_level_speed_model(
    const std::vector<SpeedCalibrationPoint>& points) {
  if (points.size() < 3) {
    throw InsufficientCalibrationError("level model needs at least 3 points");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].levels) {
      throw IncompleteDataError("calibration row " + std::to_string(i + 1) +
                                " has no level columns");
    }
    if (!(points[i].levels->object_min_plus > 0.0)) {
      throw IncompleteDataError("calibration row " + std::to_string(i + 1) +
                                " has non-positive Object Min+");
    }
  }
  using Getter = double (*)(const SpeedCalibrationPoint&);
  const std::array<std::pair<std::string_view, Getter>, 6> columns{{
      {"object_max", [](const SpeedCalibrationPoint& p) { return p.levels->object_max; }},
      {"object_min_minus", [](const SpeedCalibrationPoint& p) { return p.levels->object_min_minus; }},
      {"scene_min_plus", [](const SpeedCalibrationPoint& p) { return p.levels->scene_min_plus; }},
      {"scene_max", [](const SpeedCalibrationPoint& p) { return p.levels->scene_max; }},
      {"scene_min_minus", [](const SpeedCalibrationPoint& p) { return p.levels->scene_min_minus; }},
      {"threshold", [](const SpeedCalibrationPoint& p) { return p.threshold; }},
  }};
  LevelSpeedModel model;
  for (const auto& [name, get] : columns) {
    std::vector<double> r;
    r.reserve(points.size());
    for (const auto& p : points) r.push_back(get(p) / p.levels->object_min_plus);
    const double mean =
        std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    double dev = 0.0;
    for (double x : r) dev = std::max(dev, std::abs(x - mean));
    model.ratios.push_back({name, mean, dev});
  }
  model.curve = build_table(points).points();
  return model;
}

}  // namespace tbin
