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

namespace tbin {

/// Intensity levels measured on one pixel's temporal histogram at a given
/// conveyor speed. The names follow the calibration sheet columns and are
/// treated as opaque.
struct LevelSet {
  double object_min_plus = 0.0;
  double object_max = 0.0;
  double object_min_minus = 0.0;
  double scene_min_plus = 0.0;
  double scene_max = 0.0;
  double scene_min_minus = 0.0;

  friend bool operator==(const LevelSet&, const LevelSet&) = default;
};

struct SpeedCalibrationPoint {
  /// Conveyor speed V in m/min.
  double speed = 0.0;
  /// Optimal temporal threshold measured at that speed.
  double threshold = 0.0;
  std::optional<LevelSet> levels;

  friend bool operator==(const SpeedCalibrationPoint&,
                         const SpeedCalibrationPoint&) = default;
};

}  // namespace tbin
