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

// Synthetic line-scan / array acquisition with exact ground truth.
//
// Every emitted sample is
//
//   clamp(floor(level * I(x) * G(x) * S(x) * g(V) + noise + 0.5), 0, 255)
//
// where level is the scene or object intensity, I the illumination profile,
// G the per-cell gain, S the sensor nonlinearity segments, g the speed
// (exposure) factor and noise ~ N(0, noise_sigma). Noise is added at the
// sensor, after every gain and before quantization.
//
// Random numbers are counter based so any sample can be regenerated from
// (seed, stream, frame, pixel) alone, and serial and parallel generation are
// bit-identical. The generator is pinned:
//   * key   = mix(seed ^ mix(stream ^ mix(frame ^ mix(index))))
//   * mix   = the SplitMix64 finalizer (Steele, Lea, Flood 2014)
//   * u     = ((key >> 11) + 0.5) * 2^-53, in (0, 1)
//   * N(0,1) by Box-Muller from two uniforms at indices 2k and 2k + 1,
//     cosine branch only.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "tbin/errors.hpp"
#include "tbin/frame_stack.hpp"
#include "tbin/image.hpp"
#include "tbin/mixture_model.hpp"
#include "tbin/parallel.hpp"
#include "tbin/reference_data.hpp"

namespace tbin::sim {

namespace rng {

inline constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t frame,
                                   std::uint64_t index) noexcept {
  return mix(seed ^ mix(stream ^ mix(frame ^ mix(index))));
}

inline double uniform(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t frame, std::uint64_t index) noexcept {
  return (static_cast<double>(key(seed, stream, frame, index) >> 11) + 0.5) *
         0x1.0p-53;
}

inline double normal(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t frame, std::uint64_t index) noexcept {
  const double u1 = uniform(seed, stream, frame, 2 * index);
  const double u2 = uniform(seed, stream, frame, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

enum Stream : std::uint64_t {
  noise = 1,
  occupancy = 2,
  fraction = 3,
  cell_gain = 4,
};

}  // namespace rng

/// Monotone exposure factor g(V), piecewise linear through knots and clamped
/// outside them.
struct SpeedCurve {
  std::vector<std::pair<double, double>> knots;

  double operator()(double v) const {
    if (knots.empty()) return 1.0;
    if (v <= knots.front().first) return knots.front().second;
    if (v >= knots.back().first) return knots.back().second;
    auto it = std::upper_bound(
        knots.begin(), knots.end(), v,
        [](double s, const std::pair<double, double>& k) { return s < k.first; });
    const auto& [v1, g1] = *it;
    const auto& [v0, g0] = *(it - 1);
    return g0 + (v - v0) / (v1 - v0) * (g1 - g0);
  }
};

/// Object Min+ level of the reference speed calibration, normalized so that
/// g(20.7 m/min) = 1.
inline SpeedCurve default_speed_curve() {
  SpeedCurve c;
  const auto rows = reference_speed_calibration();
  const double ref = rows.front().levels->object_min_plus;
  for (const auto& r : rows) c.knots.emplace_back(r.speed, r.levels->object_min_plus / ref);
  return c;
}

inline constexpr double kReferenceSpeed = 20.7;

struct NonlinearSegment {
  std::size_t first = 0;  // inclusive column range
  std::size_t last = 0;
  double gain = 1.0;
};

/// Which pixels the object covers in frame i.
struct Occupancy {
  enum class Kind {
    /// Each pixel independently, with a per-pixel object fraction.
    bernoulli,
    /// Square blocks of `block_size` pixels switch together, each with its
    /// own fraction.
    blocks,
    /// Caller-supplied coverage and expected fraction.
    custom,
  };

  Kind kind = Kind::bernoulli;
  double min_fraction = 0.2;
  double max_fraction = 0.4;
  std::size_t block_size = 8;
  std::function<bool(std::size_t frame, std::size_t x, std::size_t y)> covers;
  std::function<double(std::size_t x, std::size_t y)> fraction;
};

struct SceneModel {
  std::size_t width = 1;
  std::size_t height = 1;
  double scene_level = 40.0;
  double object_level = 180.0;
  double noise_sigma = 3.0;
  /// Per-column multiplicative factors; empty means all ones.
  std::vector<double> illumination;
  std::vector<double> cell_gain;
  std::vector<NonlinearSegment> nonlinearity;
  Occupancy occupancy;
  SpeedCurve speed_curve = default_speed_curve();
  std::uint64_t seed = 1;

  static SceneModel flat(std::size_t width, std::size_t height, double scene,
                         double object, double noise, std::uint64_t seed) {
    SceneModel m;
    m.width = width;
    m.height = height;
    m.scene_level = scene;
    m.object_level = object;
    m.noise_sigma = noise;
    m.seed = seed;
    return m;
  }
};

/// I(x) falling/rising linearly from 1 - amplitude to 1 + amplitude.
inline std::vector<double> linear_illumination(std::size_t width, double amplitude) {
  std::vector<double> out(width, 1.0);
  if (width < 2) return out;
  for (std::size_t x = 0; x < width; ++x) {
    out[x] = 1.0 - amplitude +
             2.0 * amplitude * static_cast<double>(x) / static_cast<double>(width - 1);
  }
  return out;
}

/// Fixed-pattern cell gains 1 + sigma * N(0, 1), floored at 0.05.
inline std::vector<double> random_cell_gain(std::size_t width, double sigma,
                                            std::uint64_t seed) {
  std::vector<double> out(width);
  for (std::size_t x = 0; x < width; ++x) {
    out[x] = std::max(0.05, 1.0 + sigma * rng::normal(seed, rng::cell_gain, 0, x));
  }
  return out;
}

inline void validate(const SceneModel& m) {
  const auto fail = [](const std::string& what) { throw ModelError(what); };
  if (m.width == 0 || m.height == 0) fail("scene geometry is empty");
  if (!(m.scene_level > 0.0 && m.scene_level < 255.0) ||
      !(m.object_level > 0.0 && m.object_level < 255.0)) {
    fail("scene and object levels must lie in (0, 255)");
  }
  if (!(m.noise_sigma >= 0.0)) fail("noise sigma must be non-negative");
  if (!m.illumination.empty() && m.illumination.size() != m.width) {
    fail("illumination profile needs one factor per column");
  }
  for (double f : m.illumination) {
    if (!(f > 0.0)) fail("illumination factors must be positive");
  }
  if (!m.cell_gain.empty() && m.cell_gain.size() != m.width) {
    fail("cell gain needs one factor per column");
  }
  for (double g : m.cell_gain) {
    if (!(g >= 0.0)) fail("cell gains must be non-negative");
  }
  for (const auto& s : m.nonlinearity) {
    if (s.first > s.last || s.last >= m.width || !(s.gain > 0.0)) {
      fail("nonlinearity segment out of range");
    }
  }
  const auto& o = m.occupancy;
  if (o.kind == Occupancy::Kind::custom) {
    if (!o.covers || !o.fraction) fail("custom occupancy needs covers and fraction");
  } else if (!(o.min_fraction >= 0.0 && o.min_fraction <= o.max_fraction &&
               o.max_fraction <= 1.0)) {
    fail("occupancy fraction band must satisfy 0 <= min <= max <= 1");
  }
  if (o.kind == Occupancy::Kind::blocks && o.block_size == 0) fail("block size is zero");
  for (const auto& [v, g] : m.speed_curve.knots) {
    if (!(v > 0.0) || !(g > 0.0)) fail("speed curve knots must be positive");
  }
}

/// Combined column gain I(x) G(x) S(x) g(V).
inline std::vector<double> column_gain(const SceneModel& m, double speed) {
  std::vector<double> gain(m.width, m.speed_curve(speed));
  for (std::size_t x = 0; x < m.width; ++x) {
    if (!m.illumination.empty()) gain[x] *= m.illumination[x];
    if (!m.cell_gain.empty()) gain[x] *= m.cell_gain[x];
  }
  for (const auto& s : m.nonlinearity) {
    for (std::size_t x = s.first; x <= s.last; ++x) gain[x] *= s.gain;
  }
  return gain;
}

/// Expected object fraction P2 at pixel (x, y).
inline double object_fraction(const SceneModel& m, std::size_t x, std::size_t y) {
  const auto& o = m.occupancy;
  const auto band = [&](std::uint64_t index) {
    return o.min_fraction +
           (o.max_fraction - o.min_fraction) * rng::uniform(m.seed, rng::fraction, 0, index);
  };
  switch (o.kind) {
    case Occupancy::Kind::bernoulli: return band(y * m.width + x);
    case Occupancy::Kind::blocks: {
      const std::size_t bw = (m.width + o.block_size - 1) / o.block_size;
      return band((y / o.block_size) * bw + x / o.block_size);
    }
    case Occupancy::Kind::custom: return o.fraction(x, y);
  }
  return 0.0;
}

inline bool covered(const SceneModel& m, std::size_t frame, std::size_t x,
                    std::size_t y, double fraction) {
  const auto& o = m.occupancy;
  switch (o.kind) {
    case Occupancy::Kind::bernoulli:
      return rng::uniform(m.seed, rng::occupancy, frame, y * m.width + x) < fraction;
    case Occupancy::Kind::blocks: {
      const std::size_t bw = (m.width + o.block_size - 1) / o.block_size;
      const std::size_t block = (y / o.block_size) * bw + x / o.block_size;
      return rng::uniform(m.seed, rng::occupancy, frame, block) < fraction;
    }
    case Occupancy::Kind::custom: return o.covers(frame, x, y);
  }
  return false;
}

struct SimulatedStack {
  FrameStack frames;
  /// masks[i](x, y) == 1 exactly where the object covers frame i.
  std::vector<BinaryImage> masks;
};

inline std::uint8_t quantize(double v) noexcept {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

inline SimulatedStack generate_stack(const SceneModel& m, std::size_t frame_count,
                                     double speed, unsigned threads = 1) {
  validate(m);
  if (frame_count == 0) throw ModelError("frame count must be at least 1");
  if (!(speed > 0.0)) throw ModelError("speed must be positive");
  const auto gain = column_gain(m, speed);
  std::vector<double> fraction(m.width * m.height);
  for (std::size_t y = 0; y < m.height; ++y) {
    for (std::size_t x = 0; x < m.width; ++x) {
      fraction[y * m.width + x] = object_fraction(m, x, y);
    }
  }
  std::vector<GrayImage> frames(frame_count);
  std::vector<BinaryImage> masks(frame_count);
  parallel_for(frame_count, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      GrayImage img(m.width, m.height);
      BinaryImage mask(m.width, m.height);
      for (std::size_t y = 0; y < m.height; ++y) {
        for (std::size_t x = 0; x < m.width; ++x) {
          const std::size_t p = y * m.width + x;
          const bool obj = covered(m, i, x, y, fraction[p]);
          const double level = obj ? m.object_level : m.scene_level;
          double v = level * gain[x];
          if (m.noise_sigma > 0.0) v += m.noise_sigma * rng::normal(m.seed, rng::noise, i, p);
          img(x, y) = quantize(v);
          mask(x, y) = obj ? 1 : 0;
        }
      }
      frames[i] = std::move(img);
      masks[i] = std::move(mask);
    }
  });
  return {FrameStack(std::move(frames), speed), std::move(masks)};
}

/// First frame of a generated stack, with its mask.
inline std::pair<GrayImage, BinaryImage> generate_image(const SceneModel& m,
                                                         double speed = kReferenceSpeed,
                                                         std::size_t frame = 0) {
  auto s = generate_stack(m, frame + 1, speed);
  return {s.frames[frame], s.masks[frame]};
}

struct PlantedPixel {
  /// Expected background/object components before quantization.
  BimodalMixture mixture;
};

using PlantedTruth = Raster<PlantedPixel, struct PlantedTag>;

inline PlantedTruth planted_truth(const SceneModel& m, double speed) {
  validate(m);
  const auto gain = column_gain(m, speed);
  PlantedTruth out(m.width, m.height);
  for (std::size_t y = 0; y < m.height; ++y) {
    for (std::size_t x = 0; x < m.width; ++x) {
      const double p2 = object_fraction(m, x, y);
      out(x, y).mixture = {{m.scene_level * gain[x], m.noise_sigma, 1.0 - p2},
                           {m.object_level * gain[x], m.noise_sigma, p2},
                           std::nullopt};
    }
  }
  return out;
}

/// Copy of the model with the cell gain of columns [first, last] multiplied
/// by `gain`.
inline SceneModel defect_band(SceneModel m, std::size_t first, std::size_t last,
                              double gain) {
  if (first > last || last >= m.width) {
    throw ModelError("defect band [" + std::to_string(first) + ", " +
                     std::to_string(last) + "] outside " + std::to_string(m.width) +
                     " columns");
  }
  if (!(gain >= 0.0)) throw ModelError("defect gain must be non-negative");
  if (m.cell_gain.empty()) m.cell_gain.assign(m.width, 1.0);
  for (std::size_t x = first; x <= last; ++x) m.cell_gain[x] *= gain;
  return m;
}

}  // namespace tbin::sim
