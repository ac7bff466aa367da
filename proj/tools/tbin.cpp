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

// tbin command-line front end. Exit codes: 0 success, 1 domain error,
// 2 usage error. Diagnostics go to stderr, results to files or stdout.

#include <cstdio>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "tbin/tbin.hpp"

namespace {

tbin::RegionSize parse_region(const std::string& s) {
  const auto x = s.find_first_of("xX");
  if (x == std::string::npos) throw std::invalid_argument("--region expects WxH, got " + s);
  try {
    std::size_t used = 0;
    const auto w = std::stoul(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("");
    const auto h = std::stoul(s.substr(x + 1), &used);
    if (used != s.size() - x - 1) throw std::invalid_argument("");
    return {w, h};
  } catch (const std::exception&) {
    throw std::invalid_argument("--region expects WxH, got " + s);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gray-level binarization: global, dynamic and temporal thresholding"};
  app.require_subcommand(1);

  std::string img_path, out_path, calib_path, manifest_path, csv_path, table_path,
      config_path;
  std::string region;
  double tolerance = tbin::kDefaultFitTolerance;
  double error_tolerance = tbin::kDefaultErrorTolerance;
  std::size_t min_frames = tbin::kDefaultMinFrames;
  unsigned threads = 0;
  std::optional<double> speed;
  double lookup_v = 0.0;

  auto* fit_global = app.add_subcommand("fit-global", "Fit the two-class model to an image");
  fit_global->add_option("img", img_path, "Input PGM")->required();

  auto* bin_global = app.add_subcommand("binarize-global", "Binarize with one global threshold");
  bin_global->add_option("img", img_path, "Input PGM")->required();
  bin_global->add_option("out", out_path, "Output PGM (0/255)")->required();

  auto* bin_dynamic = app.add_subcommand("binarize-dynamic", "Binarize with region thresholds");
  bin_dynamic->add_option("img", img_path, "Input PGM")->required();
  bin_dynamic->add_option("out", out_path, "Output PGM (0/255)")->required();
  bin_dynamic->add_option("--region", region, "Region size WxH (default 64x64, 128x1 for lines)");
  bin_dynamic->add_option("--tolerance", tolerance, "Bimodality fit tolerance");

  auto* calibrate = app.add_subcommand("calibrate-temporal", "Per-pixel calibration from a stack");
  calibrate->add_option("manifest", manifest_path, "Stack manifest")->required();
  calibrate->add_option("out-calib", calib_path, "Output calibration base path")->required();
  calibrate->add_option("--min-frames", min_frames, "Minimum frame count");
  calibrate->add_option("--tolerance", error_tolerance, "Per-pixel expected error tolerance");
  calibrate->add_option("--threads", threads, "Worker threads (0 = auto)");

  auto* bin_temporal = app.add_subcommand("binarize-temporal", "Binarize with a calibration");
  bin_temporal->add_option("calib", calib_path, "Calibration base path")->required();
  bin_temporal->add_option("img", img_path, "Input PGM")->required();
  bin_temporal->add_option("out", out_path, "Output PGM (0/255)")->required();
  auto* speed_opt = bin_temporal->add_option("--speed", speed, "Current conveyor speed (m/min)");
  auto* table_opt = bin_temporal->add_option("--table", table_path, "Speed threshold table CSV");
  speed_opt->needs(table_opt);
  table_opt->needs(speed_opt);

  auto* quality = app.add_subcommand("quality-report", "Summarize a calibration");
  quality->add_option("calib", calib_path, "Calibration base path")->required();

  auto* build_table = app.add_subcommand("build-speed-table", "Build the 256-entry speed table");
  build_table->add_option("csv", csv_path, "Speed calibration CSV")->required();
  build_table->add_option("out", out_path, "Output table CSV")->required();

  auto* lookup = app.add_subcommand("lookup-speed", "Threshold for a conveyor speed");
  lookup->add_option("table", table_path, "Speed threshold table CSV")->required();
  lookup->add_option("V", lookup_v, "Conveyor speed (m/min)")->required();

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic frame stack");
  simulate->add_option("config", config_path, "Simulator key=value config")->required();
  simulate->add_option("out-dir", out_path, "Output directory")->required();
  simulate->add_option("--threads", threads, "Worker threads (0 = auto)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    namespace io = tbin::io;
    if (fit_global->parsed()) {
      std::cout << tbin::describe(tbin::fit_global(io::read_pgm(img_path)));
    } else if (bin_global->parsed()) {
      const auto r = tbin::global_binarize(io::read_pgm(img_path));
      io::write_binary_image(out_path, r.image);
    } else if (bin_dynamic->parsed()) {
      const auto img = io::read_pgm(img_path);
      const auto size = region.empty() ? tbin::default_region_size(img) : parse_region(region);
      const auto r = tbin::dynamic_binarize(img, size, tolerance);
      io::write_binary_image(out_path, r.image);
    } else if (calibrate->parsed()) {
      const auto loaded = io::read_stack(manifest_path);
      const auto calib = tbin::calibrate(loaded.stack, {min_frames, error_tolerance, threads});
      io::write_calibration(calib_path, calib);
    } else if (bin_temporal->parsed()) {
      auto calib = io::read_calibration(calib_path);
      if (speed) calib = tbin::at_speed(calib, io::read_speed_table(table_path), *speed);
      io::write_binary_image(out_path, tbin::apply(calib, io::read_pgm(img_path)));
    } else if (quality->parsed()) {
      std::cout << tbin::describe(tbin::quality_report(io::read_calibration(calib_path)));
    } else if (build_table->parsed()) {
      io::write_speed_table(out_path, tbin::build_table(io::read_speed_calibration(csv_path)));
    } else if (lookup->parsed()) {
      std::cout << io::format_real(tbin::lookup(io::read_speed_table(table_path), lookup_v))
                << "\n";
    } else if (simulate->parsed()) {
      tbin::sim::simulate_to_dir(tbin::sim::read_sim_config(config_path), out_path, threads);
    }
  } catch (const tbin::Error& e) {
    std::cerr << "tbin: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "tbin: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "tbin: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
