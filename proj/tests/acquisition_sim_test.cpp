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

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "tbin/acquisition_sim.hpp"
#include "tbin/histogram.hpp"
#include "tbin/optimal_threshold.hpp"

namespace {

using namespace tbin;
using sim::SceneModel;

TEST(Rng, PinnedValues) {
  // First SplitMix64 output for seed 0.
  EXPECT_EQ(sim::rng::mix(0), 0xe220a8397b1dcdafULL);
  const double u = sim::rng::uniform(1, 2, 3, 4);
  EXPECT_GT(u, 0.0);
  EXPECT_LT(u, 1.0);
  EXPECT_EQ(u, sim::rng::uniform(1, 2, 3, 4));
  EXPECT_NE(u, sim::rng::uniform(1, 2, 3, 5));
}

TEST(Rng, NormalMoments) {
  double s = 0, ss = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = sim::rng::normal(9, 1, 0, i);
    s += z;
    ss += z * z;
  }
  EXPECT_NEAR(s / n, 0, 0.01);
  EXPECT_NEAR(ss / n, 1, 0.01);
}

TEST(GenerateStack, ZeroNoiseHasTwoValues) {
  auto m = SceneModel::flat(64, 8, 40, 180, 0, 1);
  const auto s = sim::generate_stack(m, 50, sim::kReferenceSpeed);
  std::set<int> values;
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t p = 0; p < s.frames[i].size(); ++p) {
      const int v = s.frames[i].pixels()[p];
      values.insert(v);
      EXPECT_EQ(v == 180, s.masks[i].pixels()[p] == 1);
    }
  }
  EXPECT_EQ(values, (std::set<int>{40, 180}));
}

TEST(GenerateStack, DeterministicAndThreadIndependent) {
  auto m = SceneModel::flat(33, 5, 50, 160, 3, 77);
  m.illumination = sim::linear_illumination(33, 0.3);
  m.cell_gain = sim::random_cell_gain(33, 0.03, 77);
  const auto a = sim::generate_stack(m, 40, 30.0, 1);
  const auto b = sim::generate_stack(m, 40, 30.0, 4);
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_EQ(a.frames[i], b.frames[i]);
    EXPECT_EQ(a.masks[i], b.masks[i]);
  }
  m.seed = 78;
  EXPECT_NE(sim::generate_stack(m, 40, 30.0).frames[0], a.frames[0]);
}

TEST(GenerateStack, NoiseSigmaRecovered) {
  auto m = SceneModel::flat(16, 1, 60, 180, 3, 5);
  m.occupancy.min_fraction = m.occupancy.max_fraction = 0;
  const auto s = sim::generate_stack(m, 1000, sim::kReferenceSpeed);
  for (std::size_t x = 0; x < 16; ++x) {
    const auto mv = mean_and_variance(build_temporal(s.frames, x, 0));
    EXPECT_GE(std::sqrt(mv.variance), 2.5);
    EXPECT_LE(std::sqrt(mv.variance), 3.5);
    EXPECT_NEAR(mv.mean, 60, 0.5);
  }
}

TEST(GenerateStack, OccupancyFractionsInBand) {
  auto m = SceneModel::flat(64, 1, 40, 180, 0, 6);
  const auto s = sim::generate_stack(m, 2000, sim::kReferenceSpeed);
  for (std::size_t x = 0; x < 64; ++x) {
    double hits = 0;
    for (const auto& mask : s.masks) hits += mask(x, 0);
    const double f = sim::object_fraction(m, x, 0);
    EXPECT_GE(f, 0.2);
    EXPECT_LE(f, 0.4);
    EXPECT_NEAR(hits / 2000, f, 0.04);
  }
}

TEST(GenerateStack, SpeedCurveScalesLevels) {
  auto m = SceneModel::flat(4, 1, 100, 200, 0, 1);
  const auto s = sim::generate_stack(m, 30, 72.5);
  const double g = 85.877863 / 221.532847;
  for (std::size_t i = 0; i < 30; ++i) {
    const int expect = s.masks[i](0, 0) ? static_cast<int>(std::floor(200 * g + 0.5))
                                        : static_cast<int>(std::floor(100 * g + 0.5));
    EXPECT_EQ(s.frames[i](0, 0), expect);
  }
  EXPECT_DOUBLE_EQ(m.speed_curve(sim::kReferenceSpeed), 1.0);
}

TEST(GenerateStack, ClampsBright) {
  auto m = SceneModel::flat(4, 1, 100, 200, 0, 1);
  m.illumination = {2, 2, 2, 2};
  const auto s = sim::generate_stack(m, 20, sim::kReferenceSpeed);
  for (const auto& f : s.frames.frames())
    for (auto v : f.pixels()) EXPECT_TRUE(v == 200 || v == 255);
}

TEST(GenerateStack, ModelErrors) {
  auto m = SceneModel::flat(4, 1, 100, 200, 1, 1);
  EXPECT_THROW(sim::generate_stack(m, 0, 20.7), ModelError);
  EXPECT_THROW(sim::generate_stack(m, 1, 0), ModelError);
  auto bad = m;
  bad.illumination = {1, 1};
  EXPECT_THROW(sim::generate_stack(bad, 1, 20.7), ModelError);
  bad = m;
  bad.object_level = 300;
  EXPECT_THROW(sim::generate_stack(bad, 1, 20.7), ModelError);
  bad = m;
  bad.nonlinearity.push_back({2, 9, 1.1});
  EXPECT_THROW(sim::generate_stack(bad, 1, 20.7), ModelError);
  bad = m;
  bad.occupancy.max_fraction = 1.5;
  EXPECT_THROW(sim::generate_stack(bad, 1, 20.7), ModelError);
  bad = m;
  bad.occupancy.kind = sim::Occupancy::Kind::custom;
  EXPECT_THROW(sim::generate_stack(bad, 1, 20.7), ModelError);
}

TEST(PlantedTruth, FlatModelIdentical) {
  const auto t = sim::planted_truth(SceneModel::flat(10, 3, 40, 180, 3, 1), sim::kReferenceSpeed);
  for (const auto& p : t.pixels()) {
    EXPECT_DOUBLE_EQ(p.mixture.background.mu, 40);
    EXPECT_DOUBLE_EQ(p.mixture.object.mu, 180);
    EXPECT_DOUBLE_EQ(p.mixture.object.sigma, 3);
  }
}

TEST(PlantedTruth, LinearIllumination) {
  auto m = SceneModel::flat(11, 1, 40, 180, 3, 1);
  m.illumination = sim::linear_illumination(11, 0.3);
  const auto t = sim::planted_truth(m, sim::kReferenceSpeed);
  for (std::size_t x = 0; x < 11; ++x) {
    const double f = 0.7 + 0.06 * static_cast<double>(x);
    EXPECT_NEAR(t(x, 0).mixture.background.mu, 40 * f, 1e-12);
    EXPECT_NEAR(t(x, 0).mixture.object.mu, 180 * f, 1e-12);
  }
}

TEST(PlantedTruth, PredictsEmpiricalOptimum) {
  // Pixels with heavily overlapping classes: the threshold that minimizes
  // the observed error over many frames sits where the planted mixture says.
  auto m = SceneModel::flat(6, 1, 100, 112, 4, 3);
  const auto s = sim::generate_stack(m, 40000, sim::kReferenceSpeed, 4);
  const auto truth = sim::planted_truth(m, sim::kReferenceSpeed);
  for (std::size_t x = 0; x < 6; ++x) {
    const double predicted = solve_optimal(truth(x, 0).mixture).threshold;
    double best_t = 0;
    std::size_t best = SIZE_MAX;
    // thresholds between integers all classify alike, so search half-levels
    for (double t = 90.5; t <= 125.5; t += 1.0) {
      std::size_t wrong = 0;
      for (std::size_t i = 0; i < s.frames.frame_count(); ++i)
        wrong += (s.frames[i](x, 0) > t) != (s.masks[i](x, 0) == 1);
      if (wrong < best) best = wrong, best_t = t;
    }
    // integer-level data resolve the optimum only to the nearest half level
    EXPECT_LE(std::abs(best_t - predicted), 1.0) << x;
  }
}

TEST(DefectBand, UnitGainIsIdentity) {
  auto m = SceneModel::flat(200, 1, 40, 180, 3, 1);
  const auto d = sim::defect_band(m, 100, 109, 1.0);
  EXPECT_EQ(sim::generate_stack(m, 5, 20.7).frames[4], sim::generate_stack(d, 5, 20.7).frames[4]);
}

TEST(DefectBand, ZeroGainLeavesOnlyClampedNoise) {
  auto m = sim::defect_band(SceneModel::flat(200, 1, 40, 180, 3, 1), 100, 109, 0.0);
  const auto s = sim::generate_stack(m, 100, 20.7);
  for (const auto& f : s.frames.frames())
    for (std::size_t x = 100; x <= 109; ++x) EXPECT_LE(f(x, 0), 15);
}

TEST(DefectBand, OutOfRange) {
  EXPECT_THROW(sim::defect_band(SceneModel::flat(20, 1, 40, 180, 3, 1), 15, 20, 0.5), ModelError);
  EXPECT_THROW(sim::defect_band(SceneModel::flat(20, 1, 40, 180, 3, 1), 5, 4, 0.5), ModelError);
}

}  // namespace
