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
#include <stdexcept>
#include <string>
#include <string_view>

#include "tbin/errors.hpp"
#include "tbin/gaussian.hpp"
#include "tbin/histogram.hpp"
#include "tbin/mixture_model.hpp"

namespace tbin {

enum class ThresholdMethod {
  quadratic_root,
  equal_sigma,
  equal_prior_midpoint,
};

inline std::string_view to_string(ThresholdMethod m) noexcept {
  switch (m) {
    case ThresholdMethod::quadratic_root: return "quadratic-root";
    case ThresholdMethod::equal_sigma: return "equal-sigma";
    case ThresholdMethod::equal_prior_midpoint: return "equal-prior-midpoint";
  }
  return "unknown";
}

struct ThresholdResult {
  double threshold = 0.0;
  /// E(T) = P1 E2(T) + P2 E1(T).
  double expected_error = 0.0;
  ThresholdMethod method = ThresholdMethod::quadratic_root;
};

struct MisclassificationError {
  /// Object mass below T.
  double object_as_background = 0.0;
  /// Background mass above T.
  double background_as_object = 0.0;
  double total = 0.0;
};

/// Coefficients of A T^2 + B T + C = 0, whose roots are the crossings
/// P1 p1(T) = P2 p2(T).
struct QuadraticCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

inline QuadraticCoefficients threshold_quadratic(const BimodalMixture& m) {
  const auto& [mu1, s1, p1] = m.background;
  const auto& [mu2, s2, p2] = m.object;
  const double v1 = s1 * s1;
  const double v2 = s2 * s2;
  return {v1 - v2, 2.0 * (mu1 * v2 - mu2 * v1),
          v1 * mu2 * mu2 - v2 * mu1 * mu1 +
              2.0 * v1 * v2 * std::log((s2 * p1) / (s1 * p2))};
}

inline MisclassificationError misclassification_error(const BimodalMixture& m,
                                                      double threshold) noexcept {
  MisclassificationError e;
  e.object_as_background =
      gaussian::cdf(threshold, m.object.mu, m.object.sigma);
  e.background_as_object =
      gaussian::upper_tail(threshold, m.background.mu, m.background.sigma);
  e.total = m.background.prior * e.background_as_object +
            m.object.prior * e.object_as_background;
  return e;
}

/// Mass shared by the two weighted densities, summed over the 256 integer
/// levels. Multiply by the pixel count for the overlap expressed in pixels.
inline double overlap_error(const BimodalMixture& m) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < kLevels; ++i) {
    const double x = static_cast<double>(i);
    sum += std::min(m.background.weighted_pdf(x), m.object.weighted_pdf(x));
  }
  return sum;
}

namespace detail {

inline void check_solvable(const BimodalMixture& m) {
  const auto ok_component = [](const GaussianComponent& c) {
    return std::isfinite(c.mu) && c.sigma > 0.0 && c.prior > 0.0 &&
           c.prior < 1.0;
  };
  if (!ok_component(m.background) || !ok_component(m.object)) {
    throw std::invalid_argument("mixture components need sigma > 0 and 0 < P < 1");
  }
  if (!m.ordered()) {
    throw std::invalid_argument("mixture needs background mean below object mean");
  }
}

// log(P1 p1(t)) - log(P2 p2(t)); zero at the class crossing.
inline double log_density_gap(const BimodalMixture& m, double t) noexcept {
  const auto term = [t](const GaussianComponent& c) {
    const double z = (t - c.mu) / c.sigma;
    return std::log(c.prior / c.sigma) - 0.5 * z * z;
  };
  return term(m.background) - term(m.object);
}

inline double polish_root(const BimodalMixture& m, double t) noexcept {
  for (int i = 0; i < 3; ++i) {
    const double f = log_density_gap(m, t);
    const double df = -(t - m.background.mu) /
                          (m.background.sigma * m.background.sigma) +
                      (t - m.object.mu) / (m.object.sigma * m.object.sigma);
    if (df == 0.0) break;
    const double next = t - f / df;
    if (!(std::abs(log_density_gap(m, next)) < std::abs(f))) break;
    t = next;
  }
  return t;
}

}  // namespace detail

/// Minimum-error threshold between the two classes.
///
/// Equal deviations use the closed linear form (the midpoint when priors
/// are equal too); otherwise the root of the quadratic inside
/// [mu1, mu2] is taken, preferring the lower-error one if both qualify.
inline ThresholdResult solve_optimal(const BimodalMixture& m) {
  detail::check_solvable(m);
  const double mu1 = m.background.mu;
  const double mu2 = m.object.mu;
  const auto [a, b, c] = threshold_quadratic(m);
  const auto inside = [&](double t) { return t >= mu1 && t <= mu2; };
  const auto finish = [&](double t, ThresholdMethod method) {
    t = std::clamp(t, mu1, mu2);
    return ThresholdResult{t, misclassification_error(m, t).total, method};
  };
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  if (std::abs(a) < 1e-9) {
    if (m.background.sigma == m.object.sigma) {
      if (m.background.prior == m.object.prior) {
        return finish(0.5 * (mu1 + mu2), ThresholdMethod::equal_prior_midpoint);
      }
      const double s = m.background.sigma;
      const double t = 0.5 * (mu1 + mu2) +
                       s * s / (mu1 - mu2) *
                           std::log(m.object.prior / m.background.prior);
      if (!inside(t)) {
        throw NoValidThresholdError(
            "equal-sigma threshold " + std::to_string(t) +
                " falls outside the class means",
            t, nan);
      }
      return finish(t, ThresholdMethod::equal_sigma);
    }
    const double t = -c / b;
    if (!inside(t)) {
      throw NoValidThresholdError("linear threshold " + std::to_string(t) +
                                      " falls outside the class means",
                                  t, nan);
    }
    return finish(detail::polish_root(m, t), ThresholdMethod::equal_sigma);
  }

  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    throw NoValidThresholdError("threshold quadratic has no real root", nan, nan);
  }
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  const double r1 = q / a;
  const double r2 = q != 0.0 ? c / q : r1;
  const bool in1 = inside(r1);
  const bool in2 = inside(r2);
  if (!in1 && !in2) {
    throw NoValidThresholdError("no threshold root between the class means (" +
                                    std::to_string(r1) + ", " +
                                    std::to_string(r2) + ")",
                                r1, r2);
  }
  double t = in1 ? r1 : r2;
  if (in1 && in2) {
    t = misclassification_error(m, r1).total <= misclassification_error(m, r2).total
            ? r1
            : r2;
  }
  return finish(detail::polish_root(m, t), ThresholdMethod::quadratic_root);
}

}  // namespace tbin
