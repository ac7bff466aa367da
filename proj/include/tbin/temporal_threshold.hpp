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

// Temporal thresholding.
//
// Each pixel is calibrated from its own history over a stack of frames
// rather than from the spatial statistics of a single image. Calibration
// runs offline and keeps only three per-pixel maps (threshold, expected
// error, status flag); runtime binarization is one comparison per pixel.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "tbin/errors.hpp"
#include "tbin/frame_stack.hpp"
#include "tbin/gaussian.hpp"
#include "tbin/global_threshold.hpp"
#include "tbin/histogram.hpp"
#include "tbin/image.hpp"
#include "tbin/mixture.hpp"
#include "tbin/parallel.hpp"

namespace tbin {

enum class PixelFlag : char {
  ok = 'o',
  not_bimodal = 'n',
  error_above_tolerance = 'e',
};

struct FlagTag;
using FlagMap = Raster<PixelFlag, FlagTag>;

inline constexpr std::size_t kDefaultMinFrames = 200;
inline constexpr double kDefaultErrorTolerance = 1e-4;

/// Distance, in fitted deviations, from a lone mode to its fallback threshold.
inline constexpr double kFallbackSigmas = 4.0;

struct CalibrationOptions {
  std::size_t min_frames = kDefaultMinFrames;
  double error_tolerance = kDefaultErrorTolerance;
  /// 0 picks default_thread_count().
  unsigned threads = 0;
};

struct TemporalCalibration {
  ThresholdMap threshold_map;
  ErrorMap error_map;
  FlagMap flag_map;
  std::optional<double> calibration_speed;
  std::size_t frames_used = 0;
  double error_tolerance = kDefaultErrorTolerance;

  std::size_t width() const noexcept { return threshold_map.width(); }
  std::size_t height() const noexcept { return threshold_map.height(); }

  friend bool operator==(const TemporalCalibration&,
                         const TemporalCalibration&) = default;
};

namespace detail {

struct PixelFit {
  bool bimodal = false;
  double threshold = 0.0;
  double error = 0.0;
  double object_mu = 0.0;
  // Single-mode moments for pixels that failed the two-class fit.
  double mode_mu = 0.0;
  double mode_sigma = 0.0;
};

inline PixelFit fit_pixel(const FrameStack& stack, std::size_t x, std::size_t y) {
  const auto h = build_temporal(stack, x, y);
  PixelFit fit;
  try {
    const auto m = fit_bimodal(h);
    const auto t = solve_optimal(m);
    fit.bimodal = true;
    fit.threshold = t.threshold;
    fit.error = t.expected_error;
    fit.object_mu = m.object.mu;
  } catch (const NotBimodalError&) {
    const auto mode = mean_and_variance(h);
    fit.mode_mu = mode.mean;
    fit.mode_sigma = std::max(std::sqrt(mode.variance), kSigmaFloor);
  }
  return fit;
}

}  // namespace detail

/// Builds the per-pixel threshold, error and flag maps from a frame stack.
///
/// Pixels whose history is not two-class get a fallback threshold 4 sigma
/// beyond their single mode: above it when the mode is darker than the mean
/// object level of the successfully fitted pixels, below it otherwise.
inline TemporalCalibration calibrate(const FrameStack& stack,
                                     const CalibrationOptions& opts = {}) {
  if (stack.frame_count() < std::max<std::size_t>(opts.min_frames, 1)) {
    throw InsufficientFramesError(
        "calibration needs at least " + std::to_string(opts.min_frames) +
        " frames, stack has " + std::to_string(stack.frame_count()));
  }
  const std::size_t w = stack.width();
  const std::size_t h = stack.height();
  std::vector<detail::PixelFit> fits(w * h);
  parallel_for(fits.size(), opts.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      fits[i] = detail::fit_pixel(stack, i % w, i / w);
    }
  });

  double object_sum = 0.0;
  std::size_t object_n = 0;
  for (const auto& f : fits) {
    if (f.bimodal) {
      object_sum += f.object_mu;
      ++object_n;
    }
  }
  const double object_mean =
      object_n > 0 ? object_sum / static_cast<double>(object_n) : 127.5;

  TemporalCalibration calib{ThresholdMap(w, h), ErrorMap(w, h),
                            FlagMap(w, h, PixelFlag::ok), stack.speed(),
                            stack.frame_count(), opts.error_tolerance};
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const auto& f = fits[i];
    auto& thr = calib.threshold_map.pixels()[i];
    auto& err = calib.error_map.pixels()[i];
    auto& flag = calib.flag_map.pixels()[i];
    if (f.bimodal) {
      thr = f.threshold;
      err = f.error;
      flag = f.error > opts.error_tolerance ? PixelFlag::error_above_tolerance
                                            : PixelFlag::ok;
    } else {
      const bool dark = f.mode_mu < object_mean;
      const double offset = kFallbackSigmas * f.mode_sigma;
      thr = std::clamp(dark ? f.mode_mu + offset : f.mode_mu - offset, 0.0, 255.0);
      err = gaussian::upper_tail(kFallbackSigmas, 0.0, 1.0);
      flag = PixelFlag::not_bimodal;
    }
  }
  return calib;
}

/// Runtime binarization against the stored per-pixel thresholds. Flagged
/// pixels use their fallback threshold; callers can consult `flag_map`.
inline BinaryImage apply(const TemporalCalibration& calib, const GrayImage& img) {
  if (!img.same_geometry(calib.threshold_map)) {
    throw GeometryError("image " + std::to_string(img.width()) + "x" +
                        std::to_string(img.height()) + " does not match " +
                        std::to_string(calib.width()) + "x" +
                        std::to_string(calib.height()) + " calibration");
  }
  return binarize(img, calib.threshold_map);
}

struct QualityReport {
  std::size_t ok = 0;
  std::size_t not_bimodal = 0;
  std::size_t error_above_tolerance = 0;
  double max_error = 0.0;
  double mean_error = 0.0;
  /// Bounding boxes of 4-connected groups of non-ok pixels, in row-major
  /// order of their first pixel. On line-scan calibrations these are runs.
  std::vector<Rect> defect_areas;
};

inline QualityReport quality_report(const TemporalCalibration& calib) {
  QualityReport rep;
  const std::size_t w = calib.width();
  const std::size_t h = calib.height();
  const auto flags = calib.flag_map.pixels();
  const auto errors = calib.error_map.pixels();
  double sum = 0.0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    switch (flags[i]) {
      case PixelFlag::ok: ++rep.ok; break;
      case PixelFlag::not_bimodal: ++rep.not_bimodal; break;
      case PixelFlag::error_above_tolerance: ++rep.error_above_tolerance; break;
    }
    rep.max_error = std::max(rep.max_error, errors[i]);
    sum += errors[i];
  }
  rep.mean_error = flags.empty() ? 0.0 : sum / static_cast<double>(flags.size());

  std::vector<std::uint8_t> seen(flags.size(), 0);
  std::queue<std::size_t> frontier;
  for (std::size_t start = 0; start < flags.size(); ++start) {
    if (seen[start] || flags[start] == PixelFlag::ok) continue;
    std::size_t x0 = start % w, x1 = x0, y0 = start / w, y1 = y0;
    seen[start] = 1;
    frontier.push(start);
    while (!frontier.empty()) {
      const std::size_t i = frontier.front();
      frontier.pop();
      const std::size_t x = i % w;
      const std::size_t y = i / w;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
      const auto visit = [&](std::size_t j) {
        if (!seen[j] && flags[j] != PixelFlag::ok) {
          seen[j] = 1;
          frontier.push(j);
        }
      };
      if (x > 0) visit(i - 1);
      if (x + 1 < w) visit(i + 1);
      if (y > 0) visit(i - w);
      if (y + 1 < h) visit(i + w);
    }
    rep.defect_areas.push_back({x0, y0, x1 - x0 + 1, y1 - y0 + 1});
  }
  return rep;
}

struct MethodComparison {
  /// Misclassification rate of one threshold fitted to the pooled spatial
  /// histogram of every frame.
  double global_rate = 0.0;
  double global_threshold = 0.0;
  /// Misclassification rate of the per-pixel temporal calibration.
  double temporal_rate = 0.0;
};

/// Scores pooled-global and temporal thresholding against ground-truth
/// masks (one per frame) over the same stack.
inline MethodComparison compare_with_global(const FrameStack& stack,
                                            std::span<const BinaryImage> truth,
                                            const CalibrationOptions& opts = {}) {
  if (truth.size() != stack.frame_count()) {
    throw GeometryError("expected one ground-truth mask per frame");
  }
  Histogram pooled;
  for (const auto& frame : stack.frames()) pooled += build_spatial(frame);
  const auto global = solve_optimal(fit_bimodal(pooled));
  const auto calib = calibrate(stack, opts);

  std::size_t global_wrong = 0;
  std::size_t temporal_wrong = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < stack.frame_count(); ++i) {
    const auto& frame = stack[i];
    const auto& mask = truth[i];
    if (!frame.same_geometry(mask)) throw GeometryError("mask geometry mismatch");
    const auto px = frame.pixels();
    const auto thr = calib.threshold_map.pixels();
    const auto gt = mask.pixels();
    for (std::size_t j = 0; j < px.size(); ++j) {
      const double v = static_cast<double>(px[j]);
      global_wrong += (v > global.threshold ? 1 : 0) != gt[j];
      temporal_wrong += (v > thr[j] ? 1 : 0) != gt[j];
    }
    total += px.size();
  }
  const double n = static_cast<double>(total);
  return {static_cast<double>(global_wrong) / n, global.threshold,
          static_cast<double>(temporal_wrong) / n};
}

}  // namespace tbin
