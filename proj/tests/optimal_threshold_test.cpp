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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tbin/optimal_threshold.hpp"

namespace {

using namespace tbin;

oracle::Component bg(const BimodalMixture& m) {
  return {m.background.mu, m.background.sigma, m.background.prior};
}
oracle::Component obj(const BimodalMixture& m) {
  return {m.object.mu, m.object.sigma, m.object.prior};
}

BimodalMixture random_mixture(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> sig(1.0, 25.0), pri(0.1, 0.9), mu(0.0, 255.0);
  for (;;) {
    const double s1 = sig(gen), s2 = sig(gen);
    const double mu1 = mu(gen), mu2 = mu(gen);
    if (mu2 - mu1 >= 3 * (s1 + s2)) return make_mixture(mu1, s1, pri(gen), mu2, s2);
  }
}

TEST(SolveOptimal, EqualSigmaEqualPriorIsMidpoint) {
  const auto r = solve_optimal(make_mixture(50, 10, 0.5, 150, 10));
  EXPECT_DOUBLE_EQ(r.threshold, 100.0);
  EXPECT_EQ(r.method, ThresholdMethod::equal_prior_midpoint);
}

TEST(SolveOptimal, EqualSigmaClosedForm) {
  const double p1 = 1.0 / (1.0 + std::numbers::e);
  const auto m = make_mixture(50, 20, p1, 150, 20);
  const auto r = solve_optimal(m);
  EXPECT_NEAR(r.threshold, 96.0, 1e-9);
  EXPECT_EQ(r.method, ThresholdMethod::equal_sigma);
  const auto g = oracle::grid_minimum(bg(m), obj(m), 50, 150, 0.001);
  EXPECT_NEAR(g.t, 96.0, 0.001);
}

TEST(SolveOptimal, UnequalSigmaRootMatchesCrossingAndErrorMinimum) {
  // The density crossing of these classes lies at 93.679011 (bisection and
  // grid minimization of E below agree); that value is what is asserted.
  const auto m = make_mixture(60, 5, 0.5, 160, 10);
  const auto r = solve_optimal(m);
  EXPECT_EQ(r.method, ThresholdMethod::quadratic_root);
  const double cross = oracle::crossing(bg(m), obj(m), 60, 160);
  const auto g = oracle::grid_minimum(bg(m), obj(m), 60, 160, 0.001);
  EXPECT_NEAR(r.threshold, cross, 1e-9);
  EXPECT_NEAR(r.threshold, g.t, 0.01);
  EXPECT_NEAR(r.threshold, 93.679011, 1e-6);
  EXPECT_NEAR(r.expected_error, oracle::expected_error(bg(m), obj(m), r.threshold), 1e-15);
}

TEST(SolveOptimal, QuadraticCoefficientsVanishAtReturnedThreshold) {
  std::mt19937_64 gen(8);
  for (int i = 0; i < 50; ++i) {
    const auto m = random_mixture(gen);
    const auto [a, b, c] = threshold_quadratic(m);
    const double t = solve_optimal(m).threshold;
    const double scale = std::abs(a) * t * t + std::abs(b * t) + std::abs(c);
    EXPECT_LE(std::abs(a * t * t + b * t + c), 1e-9 * scale);
  }
}

TEST(SolveOptimal, StationarityOnRandomMixtures) {
  std::mt19937_64 gen(21);
  for (int i = 0; i < 100; ++i) {
    const auto m = random_mixture(gen);
    const double t = solve_optimal(m).threshold;
    const double a = m.background.weighted_pdf(t), b = m.object.weighted_pdf(t);
    EXPECT_LE(std::abs(a - b) / std::max(a, b), 1e-6) << i;
  }
}

TEST(SolveOptimal, GridOracleOnRandomMixtures) {
  std::mt19937_64 gen(77);
  for (int i = 0; i < 100; ++i) {
    const auto m = random_mixture(gen);
    const auto r = solve_optimal(m);
    const auto g = oracle::grid_minimum(bg(m), obj(m), m.background.mu, m.object.mu, 0.01);
    EXPECT_GE(g.e, oracle::expected_error(bg(m), obj(m), r.threshold) - 1e-9) << i;
    EXPECT_GE(r.threshold, m.background.mu);
    EXPECT_LE(r.threshold, m.object.mu);
    EXPECT_GE(r.expected_error, 0.0);
    EXPECT_LE(r.expected_error, 1.0);
  }
}

TEST(SolveOptimal, PerturbedSigmaAgreesWithClosedForm) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> sig(2, 20), pri(0.1, 0.9), mu(0, 100);
  for (int i = 0; i < 100; ++i) {
    const double s = sig(gen), p = pri(gen), mu1 = mu(gen), mu2 = mu1 + 6 * s + mu(gen);
    const auto closed = solve_optimal(make_mixture(mu1, s, p, mu2, s));
    const auto perturbed = solve_optimal(make_mixture(mu1, s, p, mu2, s + 1e-7));
    EXPECT_NEAR(closed.threshold, perturbed.threshold, 1e-3);
    const double eq11 = 0.5 * (mu1 + mu2) + s * s / (mu1 - mu2) * std::log((1 - p) / p);
    EXPECT_NEAR(closed.threshold, eq11, 1e-9);
  }
}

TEST(SolveOptimal, NoRootBetweenMeans) {
  // The background wins only on a short interval centered near 87, so both
  // crossings fall below the background mean.
  const auto m = make_mixture(100, 3, 0.005, 110, 4);
  try {
    solve_optimal(m);
    FAIL() << "expected NoValidThresholdError";
  } catch (const NoValidThresholdError& e) {
    const auto [r1, r2] = e.roots();
    EXPECT_TRUE(std::isfinite(r1));
    EXPECT_TRUE(std::isfinite(r2));
    EXPECT_LT(r1, 100);
    EXPECT_LT(r2, 100);
  }
}

TEST(SolveOptimal, EqualSigmaOutsideMeansThrows) {
  EXPECT_THROW(solve_optimal(make_mixture(100, 20, 1e-9, 105, 20)), NoValidThresholdError);
}

TEST(SolveOptimal, RejectsMalformedMixtures) {
  EXPECT_THROW(solve_optimal(make_mixture(150, 5, 0.5, 50, 5)), std::invalid_argument);
  EXPECT_THROW(solve_optimal(make_mixture(50, 0, 0.5, 150, 5)), std::invalid_argument);
  EXPECT_THROW(solve_optimal(make_mixture(50, 5, 0.0, 150, 5)), std::invalid_argument);
}

TEST(MisclassificationError, FullyOverlapped) {
  const auto e = misclassification_error(make_mixture(100, 8, 0.5, 100, 8), 100);
  EXPECT_DOUBLE_EQ(e.object_as_background, 0.5);
  EXPECT_DOUBLE_EQ(e.background_as_object, 0.5);
  EXPECT_DOUBLE_EQ(e.total, 0.5);
}

TEST(MisclassificationError, WideSeparation) {
  EXPECT_LE(misclassification_error(make_mixture(50, 5, 0.5, 200, 5), 125).total, 1e-10);
}

TEST(MisclassificationError, TailsLimitsAndMonotone) {
  const auto m = make_mixture(80, 6, 0.4, 170, 12);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(misclassification_error(m, -inf).object_as_background, 0.0);
  EXPECT_EQ(misclassification_error(m, inf).object_as_background, 1.0);
  EXPECT_EQ(misclassification_error(m, inf).background_as_object, 0.0);
  double prev = -1;
  for (double t = -50; t <= 300; t += 0.25) {
    const double e1 = misclassification_error(m, t).object_as_background;
    EXPECT_GE(e1, prev);
    prev = e1;
  }
}

TEST(MisclassificationError, MatchesOracleTails) {
  const auto m = make_mixture(80, 6, 0.4, 170, 12);
  for (double t = 60; t <= 190; t += 3.7) {
    EXPECT_NEAR(misclassification_error(m, t).total, oracle::expected_error(bg(m), obj(m), t), 1.5e-7);
  }
}

TEST(GaussianTails, AbsoluteAccuracy) {
  // Reference values of Q(z) = P(Z > z).
  const std::pair<double, double> ref[] = {
      {0.0, 0.5},           {1.0, 0.15865525393145707}, {2.0, 0.022750131948179212},
      {3.0, 1.3498980316301e-3}, {4.0, 3.167124183311998e-5}, {-1.5, 0.9331927987311419}};
  for (const auto& [z, q] : ref) {
    EXPECT_NEAR(gaussian::upper_tail(z, 0, 1), q, 1.5e-7);
    EXPECT_NEAR(gaussian::cdf(z, 0, 1), 1 - q, 1.5e-7);
  }
}

TEST(OverlapError, SeparatedIsZero) {
  EXPECT_LE(overlap_error(make_mixture(50, 5, 0.5, 200, 5)), 1e-9);
}

TEST(OverlapError, IdenticalComponentsNormalizeToOne) {
  const auto m = make_mixture(128, 10, 0.5, 128, 10);
  const double ov = overlap_error(m);
  EXPECT_NEAR(ov / std::min(m.background.prior, m.object.prior), 1.0, 1e-3);
}

TEST(OverlapError, MatchesFineQuadrature) {
  const auto m = make_mixture(60, 5, 0.5, 160, 10);
  const double q = oracle::simpson(
      [&](double x) { return std::min(oracle::density(bg(m), x), oracle::density(obj(m), x)); },
      0, 255, 25500);
  EXPECT_NEAR(overlap_error(m), q, 1e-3);
  EXPECT_NEAR(overlap_error(m), solve_optimal(m).expected_error, 1e-3);
}

}  // namespace
