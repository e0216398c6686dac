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
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "imgtrans/error.hpp"
#include "imgtrans/geometry.hpp"
#include "imgtrans/image.hpp"
#include "imgtrans/ocr.hpp"

namespace imgtrans {

struct MaskParams {
  double dilation_frac = 0.15;  // of each token's bbox height
  int ring_width = 3;           // pixels sampled around each masked component

  void validate() const {
    if (!(dilation_frac >= 0.0)) throw Error(ErrorKind::kConfig, "dilation_frac must be >= 0");
    if (ring_width < 1) throw Error(ErrorKind::kConfig, "ring_width must be >= 1");
  }
};

/// Union over tokens of the polygon grown outward (Chebyshev distance) by
/// dilation_frac × token height. A pixel is set when its center is covered.
inline Mask build_mask(std::span<const OCRToken> tokens, int width, int height,
                       const MaskParams& params = {}) {
  params.validate();
  Mask mask(width, height);
  for (const auto& tok : tokens) {
    const BBox box = tok.bbox();
    const double grow = params.dilation_frac * box.height();
    const BBox reach = box.expanded(grow);
    const int x0 = std::max(0, static_cast<int>(std::floor(reach.x0 - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(reach.y0 - 0.5)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(reach.x1 + 0.5)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(reach.y1 + 0.5)));
    const auto pts = tok.poly.points();
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (mask.at(x, y)) continue;
        if (near_polygon(pts, Point{x + 0.5, y + 0.5}, grow)) mask.set(x, y);
      }
    }
  }
  return mask;
}

namespace detail {

/// Median of a channel histogram; even counts average the two middle values
/// and round half up.
inline std::uint8_t histogram_median(const std::array<std::size_t, 256>& hist, std::size_t n) {
  auto kth = [&](std::size_t k) {
    std::size_t seen = 0;
    for (int v = 0; v < 256; ++v) {
      seen += hist[v];
      if (seen > k) return v;
    }
    return 255;
  };
  if (n % 2 == 1) return static_cast<std::uint8_t>(kth(n / 2));
  const int lo = kth(n / 2 - 1);
  const int hi = kth(n / 2);
  return static_cast<std::uint8_t>((lo + hi + 1) / 2);
}

struct ColorHistogram {
  std::array<std::size_t, 256> r{}, g{}, b{};
  std::size_t n = 0;

  void add(Color c) {
    ++r[c.r];
    ++g[c.g];
    ++b[c.b];
    ++n;
  }
  Color median() const {
    return {histogram_median(r, n), histogram_median(g, n), histogram_median(b, n)};
  }
};

}  // namespace detail

/// Channel-wise median of a list of colors (same rounding as naive_fill).
inline Color median_color(std::span<const Color> colors) {
  detail::ColorHistogram h;
  for (auto c : colors) h.add(c);
  if (h.n == 0) return {128, 128, 128};
  return h.median();
}

/// Fills each 8-connected mask component with the channel median of the
/// unmasked pixels within ring_width (Chebyshev) of it. Components without
/// usable ring pixels take the median of all unmasked pixels.
inline RasterImage naive_fill(const RasterImage& image, const Mask& mask,
                              const MaskParams& params = {}, Warnings* warnings = nullptr) {
  params.validate();
  if (!mask.matches(image)) {
    throw Error(ErrorKind::kInvalidArgument, "mask dimensions differ from image");
  }
  RasterImage out = image;
  const int w = image.width(), h = image.height();
  const std::size_t total = image.pixel_count();
  const std::size_t masked = mask.count();
  if (masked == 0) return out;
  if (masked == total) {
    warn(warnings, "every pixel is masked; filled with mid-gray");
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.set(x, y, {128, 128, 128});
    }
    return out;
  }

  std::optional<Color> global;
  auto global_median = [&]() {
    if (!global) {
      detail::ColorHistogram hist;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!mask.at(x, y)) hist.add(image.at(x, y));
        }
      }
      global = hist.median();
    }
    return *global;
  };

  std::vector<int> component(total, -1);
  std::vector<int> ring_stamp(total, -1);
  std::vector<std::pair<int, int>> stack, members;
  int label = 0;
  const int r = params.ring_width;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      const std::size_t sidx = static_cast<std::size_t>(sy) * w + sx;
      if (!mask.at(sx, sy) || component[sidx] >= 0) continue;
      members.clear();
      stack.assign(1, {sx, sy});
      component[sidx] = label;
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        members.push_back({x, y});
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
            if (mask.at(nx, ny) && component[nidx] < 0) {
              component[nidx] = label;
              stack.push_back({nx, ny});
            }
          }
        }
      }
      detail::ColorHistogram hist;
      for (const auto& [x, y] : members) {
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h || mask.at(nx, ny)) continue;
            const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
            if (ring_stamp[nidx] == label) continue;
            ring_stamp[nidx] = label;
            hist.add(image.at(nx, ny));
          }
        }
      }
      const Color fill = hist.n > 0 ? hist.median() : global_median();
      for (const auto& [x, y] : members) out.set(x, y, fill);
      ++label;
    }
  }
  return out;
}

class InpaintBackend {
 public:
  virtual ~InpaintBackend() = default;
  virtual const BackendInfo& info() const = 0;
  virtual RasterImage fill(const RasterImage& image, const Mask& mask) = 0;
};

class NaiveInpaint final : public InpaintBackend {
 public:
  explicit NaiveInpaint(MaskParams params = {}) : params_(params) {}
  const BackendInfo& info() const override { return info_; }
  RasterImage fill(const RasterImage& image, const Mask& mask) override {
    return naive_fill(image, mask, params_);
  }

 private:
  MaskParams params_;
  BackendInfo info_{"naive", {}, true};
};

/// Dispatches to the backend and checks its contract: same dimensions and no
/// change outside the mask. An empty mask skips the backend.
inline RasterImage inpaint(const RasterImage& image, const Mask& mask, InpaintBackend& backend) {
  if (!mask.matches(image)) {
    throw Error(ErrorKind::kInvalidArgument, "mask dimensions differ from image");
  }
  if (!mask.any()) return image;
  RasterImage out = backend.fill(image, mask);
  if (out.width() != image.width() || out.height() != image.height()) {
    throw BackendError(ErrorKind::kContractViolation, backend.info().name,
                       "output is " + std::to_string(out.width()) + "x" +
                           std::to_string(out.height()) + ", expected " +
                           std::to_string(image.width()) + "x" + std::to_string(image.height()));
  }
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (!mask.at(x, y) && !(out.at(x, y) == image.at(x, y))) {
        throw BackendError(ErrorKind::kContractViolation, backend.info().name,
                           "pixel (" + std::to_string(x) + "," + std::to_string(y) +
                               ") outside the mask was modified");
      }
    }
  }
  return out;
}

}  // namespace imgtrans
