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

#include <cstddef>

#include "tbin/histogram.hpp"
#include "tbin/image.hpp"
#include "tbin/mixture.hpp"
#include "tbin/optimal_threshold.hpp"

namespace tbin {

/// g = 1 where f > T, 0 where f <= T.
inline BinaryImage binarize(const GrayImage& img, double threshold) {
  BinaryImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<double>(src[i]) > threshold ? 1 : 0;
  }
  return out;
}

/// Pointwise binarization against a per-pixel threshold surface.
inline BinaryImage binarize(const GrayImage& img, const ThresholdMap& map) {
  if (!img.same_geometry(map)) {
    throw GeometryError("image and threshold map differ in size");
  }
  BinaryImage out(img.width(), img.height());
  auto src = img.pixels();
  auto thr = map.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<double>(src[i]) > thr[i] ? 1 : 0;
  }
  return out;
}

struct GlobalFit {
  BimodalMixture mixture;
  ThresholdResult threshold;
};

/// Image histogram -> mixture fit -> minimum-error threshold.
inline GlobalFit fit_global(const GrayImage& img) {
  const auto h = build_spatial(img);
  auto m = fit_bimodal(h);
  m.fit_error = fit_quality(m, h);
  return {m, solve_optimal(m)};
}

struct GlobalBinarization {
  BinaryImage image;
  ThresholdResult threshold;
};

inline GlobalBinarization global_binarize(const GrayImage& img) {
  auto fit = fit_global(img);
  return {binarize(img, fit.threshold.threshold), fit.threshold};
}

}  // namespace tbin
