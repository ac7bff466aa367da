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

#include <vector>

#include "tbin/speed_levels.hpp"

namespace tbin {

/// Reference conveyor measurements: one pixel's temporal levels and optimal
/// threshold at eleven speeds from 20.7 to 72.5 m/min. The same rows ship
/// as data/conveyor_speed_calibration.csv.
inline std::vector<SpeedCalibrationPoint> reference_speed_calibration() {
  // clang-format off
  return {
      {20.7, 110.766423, LevelSet{221.532847, 203.810219, 168.364964, 66.459854, 44.306569, 22.153285}},
      {25.9,  87.169312, LevelSet{174.338624, 160.391534, 132.497354, 52.301587, 34.867725, 17.433862}},
      {31.1,  73.755187, LevelSet{147.510373, 135.709544, 112.107884, 44.253112, 29.502075, 14.751037}},
      {36.2,  65.239726, LevelSet{130.479452, 120.041096,  99.164384, 39.143836, 26.095890, 13.047945}},
      {41.3,  59.256560, LevelSet{118.513120, 109.032070,  90.069971, 35.553936, 23.702624, 11.851312}},
      {46.4,  54.822335, LevelSet{109.644670, 100.873096,  83.329949, 32.893401, 21.928934, 10.964467}},
      {51.4,  51.463964, LevelSet{102.927928,  94.693694,  78.225225, 30.878378, 20.585586, 10.292793}},
      {56.5,  48.737374, LevelSet{ 97.474747,  89.676768,  74.080808, 29.242424, 19.494949,  9.747475}},
      {61.6,  46.520147, LevelSet{ 93.040293,  85.597070,  70.710623, 27.912088, 18.608059,  9.304029}},
      {66.7,  44.681742, LevelSet{ 89.363484,  82.214405,  67.916248, 26.809045, 17.872697,  8.936348}},
      {72.5,  42.938931, LevelSet{ 85.877863,  79.007634,  65.267176, 25.763359, 17.175573,  8.587786}},
  };
  // clang-format on
}

}  // namespace tbin
