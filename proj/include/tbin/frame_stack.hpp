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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbin/errors.hpp"
#include "tbin/image.hpp"

namespace tbin {

/// L co-registered frames f_i(x, y), i in [0, L), sharing one geometry.
/// Line-scan stacks have height 1. `speed` is the conveyor speed in m/min
/// the frames were acquired at, when known.
class FrameStack {
 public:
  FrameStack() = default;

  FrameStack(std::size_t width, std::size_t height,
             std::optional<double> speed = std::nullopt)
      : width_(width), height_(height), speed_(speed) {
    if (width == 0 || height == 0) throw GeometryError("frame geometry is empty");
  }

  explicit FrameStack(std::vector<GrayImage> frames,
                      std::optional<double> speed = std::nullopt)
      : speed_(speed) {
    if (frames.empty()) throw InsufficientDataError("frame list is empty");
    width_ = frames.front().width();
    height_ = frames.front().height();
    frames_.reserve(frames.size());
    for (auto& f : frames) push_back(std::move(f));
  }

  void push_back(GrayImage frame) {
    if (frame.width() != width_ || frame.height() != height_) {
      throw GeometryError("frame " + std::to_string(frames_.size()) + " is " +
                          std::to_string(frame.width()) + "x" +
                          std::to_string(frame.height()) + ", stack is " +
                          std::to_string(width_) + "x" +
                          std::to_string(height_));
    }
    frames_.push_back(std::move(frame));
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t frame_count() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }
  std::optional<double> speed() const noexcept { return speed_; }
  void set_speed(std::optional<double> v) noexcept { speed_ = v; }

  const GrayImage& operator[](std::size_t i) const { return frames_[i]; }
  std::span<const GrayImage> frames() const noexcept { return frames_; }

  bool contains(std::size_t x, std::size_t y) const noexcept {
    return x < width_ && y < height_;
  }

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::optional<double> speed_;
  std::vector<GrayImage> frames_;
};

}  // namespace tbin
