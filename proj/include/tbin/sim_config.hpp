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

// Flat key=value simulator configuration. Keys (defaults in brackets):
//
//   width, height [1], frames [200], speed [20.7], seed [1]
//   scene_level [40], object_level [180], noise_sigma [3]
//   illumination_gradient [0]   linear profile 1 -/+ amplitude across columns
//   cell_gain_sigma [0]         fixed-pattern per-column gain spread
//   occupancy [bernoulli]       bernoulli | blocks
//   block_size [8], min_fraction [0.2], max_fraction [0.4]
//   speed_curve [reference]     reference | flat
//   segment=first,last,gain     sensor nonlinearity segment (repeatable)
//   defect=first,last,gain      cell gain band multiplier (repeatable)

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tbin/acquisition_sim.hpp"
#include "tbin/errors.hpp"
#include "tbin/io.hpp"

namespace tbin::sim {

struct SimConfig {
  SceneModel model;
  std::size_t frames = 200;
  double speed = kReferenceSpeed;
};

struct GainBand {
  std::size_t first = 0;
  std::size_t last = 0;
  double gain = 1.0;
};

inline SimConfig parse_sim_config(std::string_view text, const std::string& source) {
  SimConfig cfg;
  auto& m = cfg.model;
  double gradient = 0.0;
  double gain_sigma = 0.0;
  bool have_width = false;
  std::vector<GainBand> defects;
  for (const auto& kv : io::parse_key_values(text, source)) {
    const auto where = source + ":" + std::to_string(kv.line);
    const auto real = [&](std::string_view s) {
      auto v = io::parse_real(s);
      if (!v) throw FormatError(where + ": bad number '" + std::string(s) + "'");
      return *v;
    };
    const auto count = [&](std::string_view s) {
      const double v = real(s);
      if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v))) {
        throw FormatError(where + ": expected a non-negative integer");
      }
      return static_cast<std::uint64_t>(v);
    };
    const auto band = [&] {
      const auto cells = io::detail::split_csv(kv.value);
      if (cells.size() != 3) throw FormatError(where + ": expected first,last,gain");
      return GainBand{static_cast<std::size_t>(count(cells[0])),
                      static_cast<std::size_t>(count(cells[1])), real(cells[2])};
    };
    const auto& k = kv.key;
    const std::string_view v = kv.value;
    if (k == "width") { m.width = count(v); have_width = true; }
    else if (k == "height") m.height = count(v);
    else if (k == "frames") cfg.frames = count(v);
    else if (k == "speed") cfg.speed = real(v);
    else if (k == "seed") m.seed = count(v);
    else if (k == "scene_level") m.scene_level = real(v);
    else if (k == "object_level") m.object_level = real(v);
    else if (k == "noise_sigma") m.noise_sigma = real(v);
    else if (k == "illumination_gradient") gradient = real(v);
    else if (k == "cell_gain_sigma") gain_sigma = real(v);
    else if (k == "block_size") m.occupancy.block_size = count(v);
    else if (k == "min_fraction") m.occupancy.min_fraction = real(v);
    else if (k == "max_fraction") m.occupancy.max_fraction = real(v);
    else if (k == "occupancy") {
      if (v == "bernoulli") m.occupancy.kind = Occupancy::Kind::bernoulli;
      else if (v == "blocks") m.occupancy.kind = Occupancy::Kind::blocks;
      else throw FormatError(where + ": occupancy must be bernoulli or blocks");
    } else if (k == "speed_curve") {
      if (v == "flat") m.speed_curve = {};
      else if (v != "reference") throw FormatError(where + ": speed_curve must be reference or flat");
    } else if (k == "segment") {
      const auto b = band();
      m.nonlinearity.push_back({b.first, b.last, b.gain});
    } else if (k == "defect") {
      defects.push_back(band());
    } else {
      throw FormatError(where + ": unknown key " + k);
    }
  }
  if (!have_width) throw FormatError(source + ": simulator config needs width");
  if (gradient != 0.0) m.illumination = linear_illumination(m.width, gradient);
  if (gain_sigma != 0.0) m.cell_gain = random_cell_gain(m.width, gain_sigma, m.seed);
  for (const auto& d : defects) m = defect_band(std::move(m), d.first, d.last, d.gain);
  validate(m);
  return cfg;
}

inline SimConfig read_sim_config(const std::filesystem::path& path) {
  return parse_sim_config(io::read_file(path), path.string());
}

/// Generates the configured stack and writes frames, masks and manifest into
/// `dir`. Returns the manifest path.
inline std::filesystem::path simulate_to_dir(const SimConfig& cfg,
                                             const std::filesystem::path& dir,
                                             unsigned threads = 0) {
  const auto s = generate_stack(cfg.model, cfg.frames, cfg.speed, threads);
  return io::write_stack(dir, s.frames, s.masks, cfg.model.seed);
}

}  // namespace tbin::sim
