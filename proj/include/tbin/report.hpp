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

#include <string>

#include "tbin/global_threshold.hpp"
#include "tbin/io.hpp"
#include "tbin/temporal_threshold.hpp"

namespace tbin {

/// key=value summary of a global fit, one item per line.
inline std::string describe(const GlobalFit& fit) {
  using io::format_real;
  const auto& m = fit.mixture;
  std::string out;
  out += "background_mu=" + format_real(m.background.mu) + "\n";
  out += "background_sigma=" + format_real(m.background.sigma) + "\n";
  out += "background_prior=" + format_real(m.background.prior) + "\n";
  out += "object_mu=" + format_real(m.object.mu) + "\n";
  out += "object_sigma=" + format_real(m.object.sigma) + "\n";
  out += "object_prior=" + format_real(m.object.prior) + "\n";
  out += "threshold=" + format_real(fit.threshold.threshold) + "\n";
  out += "method=" + std::string(to_string(fit.threshold.method)) + "\n";
  out += "expected_error=" + format_real(fit.threshold.expected_error) + "\n";
  if (m.fit_error) out += "fit_error=" + format_real(*m.fit_error) + "\n";
  return out;
}

inline std::string describe(const QualityReport& rep) {
  using io::format_real;
  std::string out;
  out += "ok=" + std::to_string(rep.ok) + "\n";
  out += "not_bimodal=" + std::to_string(rep.not_bimodal) + "\n";
  out += "error_above_tolerance=" + std::to_string(rep.error_above_tolerance) + "\n";
  out += "max_error=" + format_real(rep.max_error) + "\n";
  out += "mean_error=" + format_real(rep.mean_error) + "\n";
  out += "defect_areas=" + std::to_string(rep.defect_areas.size()) + "\n";
  for (const auto& r : rep.defect_areas) {
    out += "area x=" + std::to_string(r.x) + " y=" + std::to_string(r.y) +
           " width=" + std::to_string(r.width) + " height=" + std::to_string(r.height) + "\n";
  }
  return out;
}

}  // namespace tbin
