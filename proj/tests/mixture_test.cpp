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
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tbin/mixture.hpp"

namespace {

using namespace tbin;

Histogram from_counts(const std::vector<std::uint64_t>& c) {
  Histogram::Counts counts{};
  std::copy(c.begin(), c.end(), counts.begin());
  return Histogram(counts);
}

Histogram planted(double mu1, double s1, double p1, double mu2, double s2,
                  std::size_t n, std::uint64_t seed) {
  return from_counts(oracle::sample_counts({mu1, s1, p1}, {mu2, s2, 1 - p1}, n, seed));
}

TEST(MixturePdf, HandEvaluatedPoint) {
  const auto m = make_mixture(50, 10, 0.5, 150, 10);
  const double expected = 0.5 / (10 * std::sqrt(2 * std::numbers::pi));
  EXPECT_NEAR(mixture_pdf(m, 50), expected, 1e-12);
  EXPECT_NEAR(mixture_pdf(m, 50), 0.0199471, 1e-7);
}

TEST(MixturePdf, SymmetricUnderComponentSwap) {
  const auto m = make_mixture(60, 7, 0.5, 140, 7);
  const BimodalMixture swapped{m.object, m.background, std::nullopt};
  EXPECT_DOUBLE_EQ(mixture_pdf(m, 100), mixture_pdf(swapped, 100));
  EXPECT_NEAR(mixture_pdf(m, 100 - 13), mixture_pdf(m, 100 + 13), 1e-15);
}

TEST(MixturePdf, IntegratesToOne) {
  for (const auto& m : {make_mixture(50, 10, 0.5, 150, 10), make_mixture(40, 3, 0.7, 180, 5),
                        make_mixture(60, 5, 0.2, 160, 20)}) {
    const double integral =
        oracle::simpson([&](double x) { return mixture_pdf(m, x); }, -200, 450, 200000);
    EXPECT_NEAR(integral, 1.0, 1e-9);
  }
}

TEST(FitBimodal, PlantedRecovery) {
  const auto h = planted(40, 3, 0.7, 180, 5, 100000, 42);
  const auto m = fit_bimodal(h);
  EXPECT_NEAR(m.background.mu, 40, 1);
  EXPECT_NEAR(m.object.mu, 180, 1);
  EXPECT_NEAR(m.background.sigma / 3, 1, 0.1);
  EXPECT_NEAR(m.object.sigma / 5, 1, 0.1);
  EXPECT_NEAR(m.background.prior, 0.7, 0.05);
  EXPECT_EQ(m.background.prior + m.object.prior, 1.0);
  EXPECT_TRUE(m.ordered());
}

TEST(FitBimodal, SingleLevelIsNotBimodal) {
  Histogram h;
  h.add(40, 500);
  try {
    fit_bimodal(h);
    FAIL() << "expected NotBimodalError";
  } catch (const NotBimodalError& e) {
    EXPECT_DOUBLE_EQ(e.last_split(), 40.0);
  }
}

TEST(FitBimodal, TwoSpikesHitSigmaFloor) {
  Histogram h;
  h.add(0, 500);
  h.add(255, 500);
  const auto m = fit_bimodal(h);
  EXPECT_DOUBLE_EQ(m.background.mu, 0);
  EXPECT_DOUBLE_EQ(m.object.mu, 255);
  EXPECT_DOUBLE_EQ(m.background.prior, 0.5);
  EXPECT_DOUBLE_EQ(m.object.prior, 0.5);
  EXPECT_DOUBLE_EQ(m.background.sigma, kSigmaFloor);
  EXPECT_DOUBLE_EQ(m.object.sigma, kSigmaFloor);
}

TEST(FitBimodal, EmptyHistogramThrows) {
  EXPECT_THROW(fit_bimodal(Histogram{}), EmptyHistogramError);
}

// Same split, same moments; normalization may differ in the last bit.
void expect_same_fit(const BimodalMixture& a, const BimodalMixture& b) {
  const auto same = [](double x, double y) { EXPECT_NEAR(x, y, 1e-12 * std::abs(x)); };
  same(a.background.mu, b.background.mu);
  same(a.background.sigma, b.background.sigma);
  same(a.background.prior, b.background.prior);
  same(a.object.mu, b.object.mu);
  same(a.object.sigma, b.object.sigma);
  same(a.object.prior, b.object.prior);
}

TEST(FitBimodal, DuplicatingSamplesLeavesFitUnchanged) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto h = planted(70, 6, 0.35, 150, 9, 20000, seed);
    expect_same_fit(fit_bimodal(h), fit_bimodal(h.scaled(2)));
    expect_same_fit(fit_bimodal(h), fit_bimodal(h.scaled(7)));
  }
}

TEST(FitBimodal, PriorsSumToOne) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = fit_bimodal(planted(30 + seed, 4, 0.3 + 0.04 * seed, 200, 6, 5000, seed));
    EXPECT_EQ(m.background.prior + m.object.prior, 1.0);
  }
}

TEST(FitQuality, SelfComparisonIsTiny) {
  // Histogram built as the discretized, renormalized mixture itself; large
  // total so integer rounding is below the tolerance.
  const auto m = make_mixture(60, 6, 0.6, 170, 9);
  std::vector<double> d(256);
  double sum = 0;
  for (std::size_t i = 0; i < 256; ++i) sum += d[i] = mixture_pdf(m, static_cast<double>(i));
  std::vector<std::uint64_t> counts(256);
  const double total = 1e12;
  for (std::size_t i = 0; i < 256; ++i) counts[i] = static_cast<std::uint64_t>(std::llround(d[i] / sum * total));
  const auto h = from_counts(counts);
  EXPECT_LE(fit_quality(m, h), 1e-12);
}

TEST(FitQuality, MatchesDirectFormula) {
  const auto h = planted(50, 5, 0.5, 120, 8, 3000, 9);
  const auto m = make_mixture(52, 5.5, 0.45, 118, 7);
  const auto p = normalize(h);
  double sum = 0;
  for (std::size_t i = 0; i < 256; ++i) {
    const double d = oracle::density({52, 5.5, 0.45}, i) + oracle::density({118, 7, 0.55}, i) - p[i];
    sum += d * d;
  }
  EXPECT_NEAR(fit_quality(m, h), sum / 256, 1e-15);
}

TEST(FitQuality, InvariantUnderCountScaling) {
  const auto h = planted(50, 5, 0.5, 120, 8, 3000, 9);
  const auto m = fit_bimodal(h);
  EXPECT_DOUBLE_EQ(fit_quality(m, h), fit_quality(m, h.scaled(3)));
}

TEST(FitQuality, EmptyHistogramThrows) {
  EXPECT_THROW(fit_quality(make_mixture(1, 1, 0.5, 2, 1), Histogram{}), EmptyHistogramError);
}

TEST(FitQuality, ShrinksWithSampleCount) {
  std::vector<double> small, large;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto hs = planted(50, 4, 0.6, 150, 6, 1000, 100 + seed);
    const auto hl = planted(50, 4, 0.6, 150, 6, 100000, 200 + seed);
    small.push_back(fit_quality(fit_bimodal(hs), hs));
    large.push_back(fit_quality(fit_bimodal(hl), hl));
  }
  std::nth_element(small.begin(), small.begin() + 10, small.end());
  std::nth_element(large.begin(), large.begin() + 10, large.end());
  EXPECT_LT(large[10], small[10]);
}

TEST(ValidateBimodal, PlantedAccepted) {
  const auto h = planted(40, 3, 0.7, 180, 5, 100000, 4);
  const auto v = validate_bimodal(h, 1e-4);
  ASSERT_TRUE(v.accepted) << v.reason;
  ASSERT_TRUE(v.mixture);
  EXPECT_LE(v.fit_error, 1e-4);
  EXPECT_EQ(v.mixture->fit_error, v.fit_error);
}

TEST(ValidateBimodal, UniformRejectedAtTightTolerance) {
  std::vector<std::uint64_t> c(256, 40);
  const auto h = from_counts(c);
  // Fit-quality oracle computed here, outside the library.
  const auto m = fit_bimodal(h);
  double sum = 0;
  for (std::size_t i = 0; i < 256; ++i) {
    const double d = oracle::density({m.background.mu, m.background.sigma, m.background.prior}, i) +
                     oracle::density({m.object.mu, m.object.sigma, m.object.prior}, i) - 1.0 / 256;
    sum += d * d;
  }
  ASSERT_GT(sum / 256, 1e-6);
  const auto v = validate_bimodal(h, 1e-6);
  EXPECT_FALSE(v.accepted);
  EXPECT_TRUE(v.mixture);
  EXPECT_NEAR(v.fit_error, sum / 256, 1e-15);
}

TEST(ValidateBimodal, SpikeRejectedAtAnyTolerance) {
  Histogram h;
  h.add(90, 1000);
  for (double tol : {1e-12, 1e-4, 1.0, 1e6}) {
    const auto v = validate_bimodal(h, tol);
    EXPECT_FALSE(v.accepted);
    EXPECT_FALSE(v.mixture);
    EXPECT_TRUE(std::isnan(v.fit_error));
    EXPECT_FALSE(v.reason.empty());
  }
}

TEST(ValidateBimodal, NonPositiveToleranceRejected) {
  Histogram h;
  h.add(1);
  EXPECT_THROW(validate_bimodal(h, 0.0), std::invalid_argument);
  EXPECT_THROW(validate_bimodal(h, -1.0), std::invalid_argument);
}

}  // namespace
