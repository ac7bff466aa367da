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

// File formats.
//
//   * Gray images: binary PGM (P5), maxval 255. Binary images are written as
//     P5 with 0 -> 0 and 1 -> 255.
//   * Real maps: "W H" on the first line, then H lines of W whitespace
//     separated reals in shortest round-trip decimal form.
//   * Flag maps: "W H", then H lines of W characters from {o, n, e}.
//   * Calibrations: a key=value file plus sibling <base>.thr, <base>.err and
//     <base>.flags map files.
//   * Frame stacks: a key=value manifest naming the geometry, frame count,
//     speed, seed and a printf-style frame filename pattern.
//   * Speed calibration CSV: header, then "speed,threshold" with six optional
//     level columns.
//   * Speed table CSV: "# point,V,T" comment lines carrying the calibration
//     knots, a "t,speed" header, then 256 rows "t,<speed>|NEVER".
//
// Every writer goes through a temporary file renamed into place on success,
// so a failed write never leaves a partial output behind.

#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "tbin/errors.hpp"
#include "tbin/frame_stack.hpp"
#include "tbin/image.hpp"
#include "tbin/speed_compensation.hpp"
#include "tbin/temporal_threshold.hpp"

namespace tbin::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Low-level helpers

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_real(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

/// Writes `bytes` to `path` via a temporary sibling renamed into place.
inline void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("failed writing " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move output into place: " + path.string());
  }
}

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// key=value lines; blank lines and lines starting with '#' are skipped.
inline std::vector<KeyValue> parse_key_values(std::string_view text,
                                              const std::string& source) {
  std::vector<KeyValue> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(source + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto key = line.substr(0, eq);
    auto value = line.substr(eq + 1);
    while (!key.empty() && key.back() == ' ') key.remove_suffix(1);
    while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
    out.push_back({std::string(key), std::string(value), line_no});
  }
  return out;
}

// ---------------------------------------------------------------------------
// PGM

namespace detail {

struct PgmCursor {
  std::string_view data;
  std::size_t pos = 0;

  void skip_space_and_comments() {
    while (pos < data.size()) {
      const char c = data[pos];
      if (c == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
                 c == '\v') {
        ++pos;
      } else {
        break;
      }
    }
  }

  std::size_t number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos;
    std::size_t v = 0;
    while (pos < data.size() && data[pos] >= '0' && data[pos] <= '9') {
      v = v * 10 + static_cast<std::size_t>(data[pos] - '0');
      if (v > (1u << 30)) throw FormatError(std::string("PGM ") + what + " too large", start);
      ++pos;
    }
    if (pos == start) throw FormatError(std::string("PGM ") + what + " missing", start);
    return v;
  }
};

}  // namespace detail

inline GrayImage parse_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError("not a PGM file", 0);
  if (bytes[1] != '5') {
    throw FormatError(std::string("unsupported PNM variant P") + bytes[1] +
                          " (only binary P5 is read)",
                      1);
  }
  detail::PgmCursor cur{bytes, 2};
  const std::size_t width = cur.number("width");
  const std::size_t height = cur.number("height");
  cur.skip_space_and_comments();
  const std::size_t maxval_pos = cur.pos;
  const std::size_t maxval = cur.number("maxval");
  if (maxval != 255) {
    throw FormatError("PGM maxval " + std::to_string(maxval) + " unsupported (need 255)",
                      maxval_pos);
  }
  if (width == 0 || height == 0) throw FormatError("PGM geometry is empty", maxval_pos);
  if (cur.pos >= bytes.size()) throw FormatError("PGM header truncated", cur.pos);
  ++cur.pos;  // single whitespace byte before the raster
  const std::size_t need = width * height;
  if (bytes.size() - cur.pos < need) {
    throw FormatError("PGM raster truncated: need " + std::to_string(need) +
                          " bytes, have " + std::to_string(bytes.size() - cur.pos),
                      bytes.size());
  }
  std::vector<std::uint8_t> px(need);
  for (std::size_t i = 0; i < need; ++i) {
    px[i] = static_cast<std::uint8_t>(bytes[cur.pos + i]);
  }
  return GrayImage(width, height, std::move(px));
}

inline GrayImage read_pgm(const fs::path& path) {
  try {
    return parse_pgm(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError::in_file(path.string(), e);
  }
}

inline std::string encode_pgm(std::size_t width, std::size_t height,
                              std::span<const std::uint8_t> pixels) {
  if (width == 0 || height == 0) throw FormatError("cannot write an empty image");
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
  return out;
}

inline void write_pgm(const fs::path& path, const GrayImage& img) {
  write_file_atomic(path, encode_pgm(img.width(), img.height(), img.pixels()));
}

/// Binary image as P5 with object pixels at 255.
inline void write_binary_image(const fs::path& path, const BinaryImage& img) {
  std::vector<std::uint8_t> px(img.pixels().begin(), img.pixels().end());
  for (auto& p : px) p = p ? 255 : 0;
  write_file_atomic(path, encode_pgm(img.width(), img.height(), px));
}

/// Reads a PGM and maps levels above 127 to 1.
inline BinaryImage read_binary_image(const fs::path& path) {
  const auto g = read_pgm(path);
  std::vector<std::uint8_t> px(g.pixels().begin(), g.pixels().end());
  for (auto& p : px) p = p > 127 ? 1 : 0;
  return BinaryImage(g.width(), g.height(), std::move(px));
}

// ---------------------------------------------------------------------------
// Real-valued and flag maps

namespace detail {

struct TokenReader {
  std::string_view text;
  std::string source;
  std::size_t pos = 0;

  std::optional<std::string_view> next() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) return std::nullopt;
    const std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    return text.substr(start, pos - start);
  }

  std::size_t dimension(const char* what) {
    const std::size_t at = pos;
    auto tok = next();
    std::size_t v = 0;
    if (!tok || std::from_chars(tok->data(), tok->data() + tok->size(), v).ptr !=
                    tok->data() + tok->size() || v == 0) {
      throw FormatError(source + ": bad map " + what, at);
    }
    return v;
  }
};

}  // namespace detail

template <typename T, typename Tag>
std::string encode_real_map(const Raster<T, Tag>& map) {
  std::string out = std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n";
  for (std::size_t y = 0; y < map.height(); ++y) {
    for (std::size_t x = 0; x < map.width(); ++x) {
      if (x) out += ' ';
      out += format_real(static_cast<double>(map(x, y)));
    }
    out += '\n';
  }
  return out;
}

template <typename Map>
Map decode_real_map(std::string_view text, const std::string& source) {
  detail::TokenReader rd{text, source};
  const std::size_t w = rd.dimension("width");
  const std::size_t h = rd.dimension("height");
  Map map(w, h);
  for (auto& v : map.pixels()) {
    const std::size_t at = rd.pos;
    auto tok = rd.next();
    if (!tok) {
      throw FormatError(source + ": map body shorter than " + std::to_string(w) + "x" +
                            std::to_string(h) + " header",
                        at);
    }
    auto parsed = parse_real(*tok);
    if (!parsed) throw FormatError(source + ": bad number '" + std::string(*tok) + "'", at);
    v = *parsed;
  }
  const std::size_t at = rd.pos;
  if (rd.next()) {
    throw FormatError(source + ": map body longer than " + std::to_string(w) + "x" +
                          std::to_string(h) + " header",
                      at);
  }
  return map;
}

inline void write_threshold_map(const fs::path& path, const ThresholdMap& map) {
  write_file_atomic(path, encode_real_map(map));
}

inline ThresholdMap read_threshold_map(const fs::path& path) {
  return decode_real_map<ThresholdMap>(read_file(path), path.string());
}

inline void write_error_map(const fs::path& path, const ErrorMap& map) {
  write_file_atomic(path, encode_real_map(map));
}

inline ErrorMap read_error_map(const fs::path& path) {
  return decode_real_map<ErrorMap>(read_file(path), path.string());
}

inline std::string encode_flag_map(const FlagMap& map) {
  std::string out = std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n";
  for (std::size_t y = 0; y < map.height(); ++y) {
    for (std::size_t x = 0; x < map.width(); ++x) out += static_cast<char>(map(x, y));
    out += '\n';
  }
  return out;
}

inline FlagMap decode_flag_map(std::string_view text, const std::string& source) {
  detail::TokenReader rd{text, source};
  const std::size_t w = rd.dimension("width");
  const std::size_t h = rd.dimension("height");
  FlagMap map(w, h, PixelFlag::ok);
  std::size_t i = 0;
  auto px = map.pixels();
  for (; rd.pos < text.size(); ++rd.pos) {
    const char c = text[rd.pos];
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c != 'o' && c != 'n' && c != 'e') {
      throw FormatError(source + ": bad flag '" + std::string(1, c) + "'", rd.pos);
    }
    if (i >= px.size()) throw FormatError(source + ": flag body longer than header", rd.pos);
    px[i++] = static_cast<PixelFlag>(c);
  }
  if (i != px.size()) throw FormatError(source + ": flag body shorter than header", rd.pos);
  return map;
}

inline void write_flag_map(const fs::path& path, const FlagMap& map) {
  write_file_atomic(path, encode_flag_map(map));
}

inline FlagMap read_flag_map(const fs::path& path) {
  return decode_flag_map(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Calibrations

inline fs::path with_suffix(const fs::path& base, const char* suffix) {
  fs::path p = base;
  p += suffix;
  return p;
}

inline void write_calibration(const fs::path& base, const TemporalCalibration& c) {
  std::string meta = "# tbin temporal calibration\n";
  meta += "width=" + std::to_string(c.width()) + "\n";
  meta += "height=" + std::to_string(c.height()) + "\n";
  meta += "frames_used=" + std::to_string(c.frames_used) + "\n";
  meta += "error_tolerance=" + format_real(c.error_tolerance) + "\n";
  if (c.calibration_speed) meta += "speed=" + format_real(*c.calibration_speed) + "\n";
  const auto name = base.filename().string();
  meta += "thresholds=" + name + ".thr\n";
  meta += "errors=" + name + ".err\n";
  meta += "flags=" + name + ".flags\n";
  write_threshold_map(with_suffix(base, ".thr"), c.threshold_map);
  write_error_map(with_suffix(base, ".err"), c.error_map);
  write_flag_map(with_suffix(base, ".flags"), c.flag_map);
  write_file_atomic(base, meta);
}

inline TemporalCalibration read_calibration(const fs::path& base) {
  const auto src = base.string();
  TemporalCalibration c;
  std::optional<std::size_t> width, height;
  std::string thr = base.filename().string() + ".thr";
  std::string err = base.filename().string() + ".err";
  std::string flags = base.filename().string() + ".flags";
  for (const auto& kv : parse_key_values(read_file(base), src)) {
    const auto num = [&] {
      auto v = parse_real(kv.value);
      if (!v) throw FormatError(src + ":" + std::to_string(kv.line) + ": bad number");
      return *v;
    };
    if (kv.key == "width") width = static_cast<std::size_t>(num());
    else if (kv.key == "height") height = static_cast<std::size_t>(num());
    else if (kv.key == "frames_used") c.frames_used = static_cast<std::size_t>(num());
    else if (kv.key == "error_tolerance") c.error_tolerance = num();
    else if (kv.key == "speed") c.calibration_speed = num();
    else if (kv.key == "thresholds") thr = kv.value;
    else if (kv.key == "errors") err = kv.value;
    else if (kv.key == "flags") flags = kv.value;
    else throw FormatError(src + ":" + std::to_string(kv.line) + ": unknown key " + kv.key);
  }
  const auto dir = base.parent_path();
  c.threshold_map = read_threshold_map(dir / thr);
  c.error_map = read_error_map(dir / err);
  c.flag_map = read_flag_map(dir / flags);
  if (!c.threshold_map.same_geometry(c.error_map) ||
      !c.threshold_map.same_geometry(c.flag_map) ||
      (width && *width != c.width()) || (height && *height != c.height())) {
    throw FormatError(src + ": calibration maps disagree on geometry");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Frame stacks

struct Manifest {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t frame_count = 0;
  std::optional<double> speed;
  std::optional<std::uint64_t> seed;
  std::string pattern = "frame_%05d.pgm";
  std::optional<std::string> mask_pattern;

  /// Expands the single %d / %0Nd conversion in `pattern`.
  static std::string expand(const std::string& pattern, std::size_t index) {
    const auto pct = pattern.find('%');
    if (pct == std::string::npos) throw FormatError("pattern '" + pattern + "' has no %d");
    std::size_t end = pct + 1;
    std::size_t width = 0;
    bool zero = false;
    if (end < pattern.size() && pattern[end] == '0') {
      zero = true;
      ++end;
    }
    while (end < pattern.size() && pattern[end] >= '0' && pattern[end] <= '9') {
      width = width * 10 + static_cast<std::size_t>(pattern[end] - '0');
      ++end;
    }
    if (end >= pattern.size() || pattern[end] != 'd') {
      throw FormatError("pattern '" + pattern + "' needs a %d conversion");
    }
    std::string digits = std::to_string(index);
    if (digits.size() < width) digits.insert(0, width - digits.size(), zero ? '0' : ' ');
    return pattern.substr(0, pct) + digits + pattern.substr(end + 1);
  }

  std::string frame_name(std::size_t i) const { return expand(pattern, i); }
  std::optional<std::string> mask_name(std::size_t i) const {
    if (!mask_pattern) return std::nullopt;
    return expand(*mask_pattern, i);
  }
};

inline std::string encode_manifest(const Manifest& m) {
  std::string out = "# tbin frame stack\n";
  out += "width=" + std::to_string(m.width) + "\n";
  out += "height=" + std::to_string(m.height) + "\n";
  out += "frames=" + std::to_string(m.frame_count) + "\n";
  if (m.speed) out += "speed=" + format_real(*m.speed) + "\n";
  if (m.seed) out += "seed=" + std::to_string(*m.seed) + "\n";
  out += "pattern=" + m.pattern + "\n";
  if (m.mask_pattern) out += "mask_pattern=" + *m.mask_pattern + "\n";
  return out;
}

inline Manifest parse_manifest(std::string_view text, const std::string& source) {
  Manifest m;
  bool have_w = false, have_h = false, have_n = false;
  for (const auto& kv : parse_key_values(text, source)) {
    const auto where = source + ":" + std::to_string(kv.line);
    const auto count = [&] {
      std::size_t v = 0;
      const auto* b = kv.value.data();
      const auto* e = b + kv.value.size();
      if (kv.value.empty() || std::from_chars(b, e, v).ptr != e) {
        throw FormatError(where + ": bad integer '" + kv.value + "'");
      }
      return v;
    };
    if (kv.key == "width") { m.width = count(); have_w = true; }
    else if (kv.key == "height") { m.height = count(); have_h = true; }
    else if (kv.key == "frames") { m.frame_count = count(); have_n = true; }
    else if (kv.key == "seed") m.seed = count();
    else if (kv.key == "speed") {
      auto v = parse_real(kv.value);
      if (!v) throw FormatError(where + ": bad speed '" + kv.value + "'");
      m.speed = *v;
    }
    else if (kv.key == "pattern") m.pattern = kv.value;
    else if (kv.key == "mask_pattern") m.mask_pattern = kv.value;
    else throw FormatError(where + ": unknown key " + kv.key);
  }
  if (!have_w || !have_h || !have_n || m.width == 0 || m.height == 0) {
    throw FormatError(source + ": manifest needs width, height and frames");
  }
  return m;
}

struct LoadedStack {
  Manifest manifest;
  FrameStack stack;
  /// Ground-truth masks, when the manifest names them.
  std::vector<BinaryImage> masks;
};

inline LoadedStack read_stack(const fs::path& manifest_path) {
  LoadedStack out;
  out.manifest = parse_manifest(read_file(manifest_path), manifest_path.string());
  const auto& m = out.manifest;
  const auto dir = manifest_path.parent_path();
  out.stack = FrameStack(m.width, m.height, m.speed);
  const auto load = [&](const std::string& name) {
    const auto path = dir / name;
    if (!fs::exists(path)) throw ManifestError("missing frame", name);
    auto img = read_pgm(path);
    if (img.width() != m.width || img.height() != m.height) {
      throw ManifestError("frame is " + std::to_string(img.width()) + "x" +
                              std::to_string(img.height()) + ", manifest says " +
                              std::to_string(m.width) + "x" + std::to_string(m.height),
                          name);
    }
    return img;
  };
  for (std::size_t i = 0; i < m.frame_count; ++i) out.stack.push_back(load(m.frame_name(i)));
  if (m.mask_pattern) {
    out.masks.reserve(m.frame_count);
    for (std::size_t i = 0; i < m.frame_count; ++i) {
      const auto g = load(*m.mask_name(i));
      std::vector<std::uint8_t> px(g.pixels().begin(), g.pixels().end());
      for (auto& p : px) p = p > 127 ? 1 : 0;
      out.masks.emplace_back(g.width(), g.height(), std::move(px));
    }
  }
  return out;
}

/// Writes every frame (and mask, when given) next to a manifest named
/// `stack.manifest` in `dir`; returns the manifest path.
inline fs::path write_stack(const fs::path& dir, const FrameStack& stack,
                            std::span<const BinaryImage> masks = {},
                            std::optional<std::uint64_t> seed = std::nullopt) {
  if (stack.empty()) throw InsufficientDataError("cannot write an empty stack");
  if (!masks.empty() && masks.size() != stack.frame_count()) {
    throw GeometryError("mask count does not match frame count");
  }
  fs::create_directories(dir);
  Manifest m;
  m.width = stack.width();
  m.height = stack.height();
  m.frame_count = stack.frame_count();
  m.speed = stack.speed();
  m.seed = seed;
  if (!masks.empty()) m.mask_pattern = "mask_%05d.pgm";
  for (std::size_t i = 0; i < stack.frame_count(); ++i) {
    write_pgm(dir / m.frame_name(i), stack[i]);
    if (!masks.empty()) write_binary_image(dir / *m.mask_name(i), masks[i]);
  }
  const auto path = dir / "stack.manifest";
  write_file_atomic(path, encode_manifest(m));
  return path;
}

// ---------------------------------------------------------------------------
// Speed calibration and table CSV

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::vector<std::pair<std::size_t, std::string_view>> lines_of(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t pos = 0;
  std::size_t n = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    auto line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(++n, line);
    pos = eol + 1;
  }
  return out;
}

}  // namespace detail

/// Parses the calibration CSV. Data rows are numbered from 1 after the
/// header, matching the row numbers build_table reports.
inline std::vector<SpeedCalibrationPoint> parse_speed_calibration(std::string_view text,
                                                                  const std::string& source) {
  std::vector<SpeedCalibrationPoint> points;
  bool header = true;
  for (const auto& [n, line] : detail::lines_of(text)) {
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      if (!parse_real(detail::split_csv(line).front())) continue;
    }
    const auto cells = detail::split_csv(line);
    if (cells.size() != 2 && cells.size() != 8) {
      throw FormatError(source + ":" + std::to_string(n) + ": expected 2 or 8 columns, got " +
                        std::to_string(cells.size()));
    }
    std::vector<double> v;
    for (auto c : cells) {
      auto x = parse_real(c);
      if (!x) throw FormatError(source + ":" + std::to_string(n) + ": bad number '" + std::string(c) + "'");
      v.push_back(*x);
    }
    SpeedCalibrationPoint p{v[0], v[1], std::nullopt};
    if (v.size() == 8) p.levels = LevelSet{v[2], v[3], v[4], v[5], v[6], v[7]};
    points.push_back(p);
  }
  return points;
}

inline std::vector<SpeedCalibrationPoint> read_speed_calibration(const fs::path& path) {
  return parse_speed_calibration(read_file(path), path.string());
}

inline void write_speed_calibration(const fs::path& path,
                                    const std::vector<SpeedCalibrationPoint>& points) {
  std::string out = "speed,threshold,object_min_plus,object_max,object_min_minus,"
                    "scene_min_plus,scene_max,scene_min_minus\n";
  for (const auto& p : points) {
    out += format_real(p.speed) + "," + format_real(p.threshold);
    if (p.levels) {
      const auto& l = *p.levels;
      for (double x : {l.object_min_plus, l.object_max, l.object_min_minus, l.scene_min_plus,
                       l.scene_max, l.scene_min_minus}) {
        out += "," + format_real(x);
      }
    }
    out += "\n";
  }
  write_file_atomic(path, out);
}

inline std::string encode_speed_table(const SpeedThresholdTable& table) {
  std::string out = "# tbin speed threshold table\n";
  for (const auto& p : table.points()) {
    out += "# point," + format_real(p.speed) + "," + format_real(p.threshold) + "\n";
  }
  out += "t,speed\n";
  const auto& e = table.entries();
  for (std::size_t t = 0; t < kSpeedTableSize; ++t) {
    out += std::to_string(t) + "," + (e[t] ? format_real(*e[t]) : std::string("NEVER")) + "\n";
  }
  return out;
}

inline SpeedThresholdTable parse_speed_table(std::string_view text, const std::string& source) {
  std::vector<SpeedCalibrationPoint> points;
  SpeedThresholdTable::Entries entries{};
  std::size_t rows = 0;
  bool header_seen = false;
  for (const auto& [n, line] : detail::lines_of(text)) {
    const auto where = source + ":" + std::to_string(n);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view tag = "# point,";
      if (line.starts_with(tag)) {
        const auto cells = detail::split_csv(line.substr(tag.size()));
        std::optional<double> v, t;
        if (cells.size() == 2) {
          v = parse_real(cells[0]);
          t = parse_real(cells[1]);
        }
        if (!v || !t) throw FormatError(where + ": bad calibration point");
        points.push_back({*v, *t, std::nullopt});
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line == "t,speed") continue;
    }
    const auto cells = detail::split_csv(line);
    if (cells.size() != 2) throw FormatError(where + ": expected 't,speed'");
    const auto t = parse_real(cells[0]);
    if (!t || *t != static_cast<double>(rows)) {
      throw FormatError(where + ": expected row index " + std::to_string(rows));
    }
    if (rows >= kSpeedTableSize) throw FormatError(where + ": more than 256 table rows");
    if (cells[1] != "NEVER") {
      const auto s = parse_real(cells[1]);
      if (!s) throw FormatError(where + ": bad speed '" + std::string(cells[1]) + "'");
      entries[rows] = *s;
    }
    ++rows;
  }
  if (rows != kSpeedTableSize) {
    throw FormatError(source + ": table has " + std::to_string(rows) + " rows, need 256");
  }
  if (points.size() < 2) throw FormatError(source + ": table lists fewer than 2 calibration points");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].speed > points[i - 1].speed) ||
        points[i].threshold > points[i - 1].threshold) {
      throw TableCorruptionError(source + ": calibration points not sorted and monotone");
    }
  }
  return SpeedThresholdTable(std::move(points), entries);
}

inline void write_speed_table(const fs::path& path, const SpeedThresholdTable& table) {
  write_file_atomic(path, encode_speed_table(table));
}

inline SpeedThresholdTable read_speed_table(const fs::path& path) {
  return parse_speed_table(read_file(path), path.string());
}

}  // namespace tbin::io
