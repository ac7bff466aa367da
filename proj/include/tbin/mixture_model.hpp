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

#include <optional>

#include "tbin/gaussian.hpp"

namespace tbin {

/// Smallest standard deviation a fitted class may have, in levels. A class
/// that collapses onto one bin still has sub-quantization spread.
inline constexpr double kSigmaFloor = 0.25;

struct GaussianComponent {
  double mu = 0.0;
  double sigma = 1.0;
  double prior = 0.5;

  double weighted_pdf(double x) const noexcept {
    return prior * gaussian::pdf(x, mu, sigma);
  }

  friend bool operator==(const GaussianComponent&,
                         const GaussianComponent&) = default;
};

/// Dark background (component 1) plus bright object (component 2).
/// Fitted mixtures always have background.mu < object.mu and priors summing
/// to one; hand-built mixtures are checked where an operation needs that.
struct BimodalMixture {
  GaussianComponent background;
  GaussianComponent object;
  /// Mean-square deviation from the histogram it was validated against.
  std::optional<double> fit_error;

  bool ordered() const noexcept { return background.mu < object.mu; }

  friend bool operator==(const BimodalMixture&, const BimodalMixture&) = default;
};

/// P1 p1(x) + P2 p2(x).
inline double mixture_pdf(const BimodalMixture& m, double x) noexcept {
  return m.background.weighted_pdf(x) + m.object.weighted_pdf(x);
}

inline BimodalMixture make_mixture(double mu1, double sigma1, double prior1,
                                   double mu2, double sigma2) {
  return {{mu1, sigma1, prior1}, {mu2, sigma2, 1.0 - prior1}, std::nullopt};
}

}  // namespace tbin
