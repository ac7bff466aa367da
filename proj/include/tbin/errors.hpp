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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tbin {

/// Base of every domain error raised by the library. The CLI maps these to
/// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class EmptyHistogramError : public Error {
 public:
  using Error::Error;
};

class EmptyClassError : public Error {
 public:
  using Error::Error;
};

/// The two-class split collapsed or did not settle. `last_split` is the
/// threshold the iteration was using when it gave up.
class NotBimodalError : public Error {
 public:
  NotBimodalError(const std::string& what, double last_split)
      : Error(what), last_split_(last_split) {}
  double last_split() const noexcept { return last_split_; }

 private:
  double last_split_;
};

/// No root of the minimum-error quadratic lies between the class means.
/// Roots are NaN when the discriminant is negative.
class NoValidThresholdError : public Error {
 public:
  NoValidThresholdError(const std::string& what, double root1, double root2)
      : Error(what), roots_{root1, root2} {}
  std::pair<double, double> roots() const noexcept { return roots_; }

 private:
  std::pair<double, double> roots_;
};

class InvalidRegionSizeError : public Error {
 public:
  using Error::Error;
};

class NoValidRegionError : public Error {
 public:
  using Error::Error;
};

class InsufficientFramesError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class InsufficientCalibrationError : public Error {
 public:
  using Error::Error;
};

/// Speed calibration thresholds rise with speed. `rows` holds the 1-based
/// input rows of each offending pair (later row of the pair).
class MonotonicityError : public Error {
 public:
  MonotonicityError(const std::string& what, std::vector<std::size_t> rows)
      : Error(what), rows_(std::move(rows)) {}
  const std::vector<std::size_t>& rows() const noexcept { return rows_; }

 private:
  std::vector<std::size_t> rows_;
};

class TableCorruptionError : public Error {
 public:
  using Error::Error;
};

class IncompleteDataError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

/// Malformed file. `offset` is the byte position where parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  explicit FormatError(const std::string& what) : Error(what), offset_(0) {}

  /// Same error, message prefixed with the file it came from.
  static FormatError in_file(const std::string& file, const FormatError& e) {
    FormatError out(file + ": " + e.what());
    out.offset_ = e.offset_;
    return out;
  }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A frame stack manifest references a missing or inconsistent frame.
class ManifestError : public Error {
 public:
  ManifestError(const std::string& what, std::string frame)
      : Error(what + ": " + frame), frame_(std::move(frame)) {}
  const std::string& frame() const noexcept { return frame_; }

 private:
  std::string frame_;
};

}  // namespace tbin
