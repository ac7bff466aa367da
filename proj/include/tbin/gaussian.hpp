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

#include <cmath>
#include <numbers>

namespace tbin::gaussian {

inline double pdf(double x, double mu, double sigma) noexcept {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

/// P(X <= x). libm erfc is accurate to a few ulp, well inside 1.5e-7.
inline double cdf(double x, double mu, double sigma) noexcept {
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

/// P(X > x), computed directly so deep tails keep their relative accuracy.
inline double upper_tail(double x, double mu, double sigma) noexcept {
  return 0.5 * std::erfc((x - mu) / (sigma * std::numbers::sqrt2));
}

}  // namespace tbin::gaussian
