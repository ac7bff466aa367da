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
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "tbin/errors.hpp"
#include "tbin/histogram.hpp"
#include "tbin/mixture_model.hpp"
#include "tbin/optimal_threshold.hpp"

namespace tbin {

inline constexpr double kDefaultFitTolerance = 1e-4;

struct FitOptions {
  int max_iterations = 100;
  /// Iteration stops once the split moves by less than this many levels.
  double convergence = 0.5;
};

/// Two-class hard-split fit.
///
/// Starting from the histogram mean, the bins are split into [0, T] and
/// (T, 255]; each side gives a class mass, mean and deviation, and the
/// minimum-error threshold of the resulting mixture becomes the next split.
/// Stops when the split moves by less than half a level.
inline BimodalMixture fit_bimodal(const Histogram& h, FitOptions opts = {}) {
  if (h.total() == 0) throw EmptyHistogramError("histogram has no samples");
  double split = mean_and_variance(h).mean;
  if (h.occupied_bins() < 2) {
    throw NotBimodalError("histogram occupies a single level", split);
  }
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const double bin = std::floor(split);
    if (bin < 0.0 || bin >= static_cast<double>(kLevels - 1)) {
      throw NotBimodalError("split left one class empty", split);
    }
    const auto k = static_cast<std::size_t>(bin);
    BimodalMixture m;
    try {
      const auto lo = mean_and_variance(h, {0, k});
      const auto hi = mean_and_variance(h, {k + 1, kLevels - 1});
      m.background = {lo.mean, std::max(std::sqrt(lo.variance), kSigmaFloor),
                      lo.mass};
      m.object = {hi.mean, std::max(std::sqrt(hi.variance), kSigmaFloor),
                  1.0 - lo.mass};
    } catch (const EmptyClassError&) {
      throw NotBimodalError("split left one class empty", split);
    }
    double next = 0.0;
    try {
      next = solve_optimal(m).threshold;
    } catch (const NoValidThresholdError&) {
      throw NotBimodalError("fitted classes have no valid threshold", split);
    }
    if (std::abs(next - split) < opts.convergence) return m;
    split = next;
  }
  throw NotBimodalError("two-class split did not converge in " +
                            std::to_string(opts.max_iterations) + " iterations",
                        split);
}

/// Mean-square gap between the mixture density sampled at the 256 levels and
/// the normalized histogram.
inline double fit_quality(const BimodalMixture& m, const Histogram& h) {
  const auto p = normalize(h);
  double sum = 0.0;
  for (std::size_t i = 0; i < kLevels; ++i) {
    const double d = mixture_pdf(m, static_cast<double>(i)) - p[i];
    sum += d * d;
  }
  return sum / static_cast<double>(kLevels);
}

struct BimodalValidation {
  bool accepted = false;
  /// Present whenever the fit itself succeeded, accepted or not.
  std::optional<BimodalMixture> mixture;
  /// Measured fit error; NaN when the fit failed.
  double fit_error = std::numeric_limits<double>::quiet_NaN();
  std::string reason;
};

inline BimodalValidation validate_bimodal(const Histogram& h,
                                          double tolerance = kDefaultFitTolerance) {
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("bimodality tolerance must be positive");
  }
  BimodalValidation v;
  try {
    auto m = fit_bimodal(h);
    v.fit_error = fit_quality(m, h);
    m.fit_error = v.fit_error;
    v.mixture = m;
    v.accepted = v.fit_error <= tolerance;
    if (!v.accepted) {
      v.reason = "fit error " + std::to_string(v.fit_error) +
                 " exceeds tolerance " + std::to_string(tolerance);
    }
  } catch (const NotBimodalError& e) {
    v.reason = e.what();
  } catch (const EmptyHistogramError& e) {
    v.reason = e.what();
  }
  return v;
}

}  // namespace tbin
