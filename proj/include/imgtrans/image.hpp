// Copyright 2026 The imgtrans Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "imgtrans/error.hpp"
#include "imgtrans/geometry.hpp"

namespace imgtrans {

/// Row-major 8-bit RGB pixel grid.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, Color fill = {255, 255, 255})
      : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
      throw Error(ErrorKind::kInvalidArgument, "image dimensions must be positive");
    }
    pixels_.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
      pixels_[i] = fill.r;
      pixels_[i + 1] = fill.g;
      pixels_[i + 2] = fill.b;
    }
  }
  RasterImage(int width, int height, std::vector<std::uint8_t> rgb)
      : width_(width), height_(height), pixels_(std::move(rgb)) {
    if (width <= 0 || height <= 0 ||
        pixels_.size() != static_cast<std::size_t>(width) * height * 3) {
      throw Error(ErrorKind::kInvalidArgument, "pixel buffer does not match dimensions");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

  Color at(int x, int y) const {
    const std::size_t i = offset(x, y);
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
  }
  void set(int x, int y, Color c) {
    const std::size_t i = offset(x, y);
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
  }

  std::span<const std::uint8_t> data() const { return pixels_; }
  std::span<std::uint8_t> data() { return pixels_; }

  /// Copies the integer pixel region covering `region`, clamped to the image.
  RasterImage crop(const BBox& region) const {
    const int x0 = std::clamp(static_cast<int>(std::floor(region.x0)), 0, width_ - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(region.y0)), 0, height_ - 1);
    const int x1 = std::clamp(static_cast<int>(std::ceil(region.x1)), x0 + 1, width_);
    const int y1 = std::clamp(static_cast<int>(std::ceil(region.y1)), y0 + 1, height_);
    RasterImage out(x1 - x0, y1 - y0);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) out.set(x - x0, y - y0, at(x, y));
    }
    return out;
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Row-major boolean grid paired with a RasterImage of the same size.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
      throw Error(ErrorKind::kInvalidArgument, "mask dimensions must be positive");
    }
    bits_.assign(static_cast<std::size_t>(width) * height, 0);
  }

  int width() const { return width_; }
  int height() const { return height_; }

  bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool v = true) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }

  bool matches(const RasterImage& img) const {
    return width_ == img.width() && height_ == img.height();
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
  }
  bool any() const {
    for (auto b : bits_) {
      if (b) return true;
    }
    return false;
  }

  Mask& operator|=(const Mask& other) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
    return *this;
  }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Sets every pixel whose center lies inside the closed box.
inline void fill_box(Mask& mask, const BBox& box) {
  const int x0 = std::max(0, static_cast<int>(std::ceil(box.x0 - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(box.y0 - 0.5)));
  const int x1 = std::min(mask.width() - 1, static_cast<int>(std::floor(box.x1 - 0.5)));
  const int y1 = std::min(mask.height() - 1, static_cast<int>(std::floor(box.y1 - 0.5)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) mask.set(x, y);
  }
}

}  // namespace imgtrans
