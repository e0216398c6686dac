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

// Pixel-space primitives. Coordinates are floats in image space with the
// origin at the top-left corner; rounding happens only when rasterizing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "imgtrans/error.hpp"

namespace imgtrans {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct BBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  /// Validating factory; throws invalid-geometry when the corners are swapped.
  static BBox make(double x0, double y0, double x1, double y1) {
    if (!(x0 <= x1) || !(y0 <= y1)) {
      throw Error(ErrorKind::kInvalidGeometry, "bbox corners out of order");
    }
    return BBox{x0, y0, x1, y1};
  }

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x0 + x1); }
  double center_y() const { return 0.5 * (y0 + y1); }
  bool degenerate() const { return !(width() > 0.0) || !(height() > 0.0); }

  bool contains(const Point& p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  bool contains(const BBox& b, double eps = 0.0) const {
    return b.x0 >= x0 - eps && b.y0 >= y0 - eps && b.x1 <= x1 + eps && b.y1 <= y1 + eps;
  }

  /// Grows each side by `fx` × width and `fy` × height.
  BBox padded(double fx, double fy) const {
    const double dx = fx * width();
    const double dy = fy * height();
    return BBox{x0 - dx, y0 - dy, x1 + dx, y1 + dy};
  }
  BBox padded(double frac) const { return padded(frac, frac); }

  BBox expanded(double by) const { return BBox{x0 - by, y0 - by, x1 + by, y1 + by}; }

  BBox translated(double dx, double dy) const {
    return BBox{x0 + dx, y0 + dy, x1 + dx, y1 + dy};
  }

  BBox clamped(double width_limit, double height_limit) const {
    auto cx = [&](double v) { return std::clamp(v, 0.0, width_limit); };
    auto cy = [&](double v) { return std::clamp(v, 0.0, height_limit); };
    return BBox{cx(x0), cy(y0), cx(x1), cy(y1)};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

class Polygon {
 public:
  Polygon() = default;

  /// Throws invalid-geometry for fewer than three points or a zero-area
  /// bounding envelope.
  explicit Polygon(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.size() < 3) {
      throw Error(ErrorKind::kInvalidGeometry, "polygon needs at least 3 points");
    }
    double x0 = points_[0].x, x1 = x0, y0 = points_[0].y, y1 = y0;
    for (const auto& p : points_) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw Error(ErrorKind::kInvalidGeometry, "polygon point is not finite");
      }
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    if (!(x1 > x0) || !(y1 > y0)) {
      throw Error(ErrorKind::kInvalidGeometry, "polygon has zero-area envelope");
    }
  }

  static Polygon from_bbox(const BBox& b) {
    return Polygon({{b.x0, b.y0}, {b.x1, b.y0}, {b.x1, b.y1}, {b.x0, b.y1}});
  }

  std::span<const Point> points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  Polygon translated(double dx, double dy) const {
    auto pts = points_;
    for (auto& p : pts) {
      p.x += dx;
      p.y += dy;
    }
    return Polygon(std::move(pts));
  }

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  std::vector<Point> points_;
};

struct Color {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Color&, const Color&) = default;
};

inline BBox polygon_to_bbox(std::span<const Point> points) {
  if (points.size() < 3) {
    throw Error(ErrorKind::kInvalidGeometry, "polygon needs at least 3 points");
  }
  BBox b{points[0].x, points[0].y, points[0].x, points[0].y};
  for (const auto& p : points) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

inline BBox polygon_to_bbox(const Polygon& p) { return polygon_to_bbox(p.points()); }

inline BBox bbox_union(const BBox& a, const BBox& b) {
  return BBox{std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
              std::max(a.y1, b.y1)};
}

inline double interval_overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

inline double interval_gap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::max(a0, b0) - std::min(a1, b1));
}

inline double bbox_iou(const BBox& a, const BBox& b) {
  const double inter = interval_overlap(a.x0, a.x1, b.x0, b.x1) *
                       interval_overlap(a.y0, a.y1, b.y0, b.y1);
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

/// Vertical-interval overlap relative to the shorter box; 0 for zero heights.
inline double v_overlap(const BBox& a, const BBox& b) {
  const double shorter = std::min(a.height(), b.height());
  if (!(shorter > 0.0)) return 0.0;
  return std::clamp(interval_overlap(a.y0, a.y1, b.y0, b.y1) / shorter, 0.0, 1.0);
}

/// Horizontal counterpart of v_overlap.
inline double h_overlap(const BBox& a, const BBox& b) {
  const double narrower = std::min(a.width(), b.width());
  if (!(narrower > 0.0)) return 0.0;
  return std::clamp(interval_overlap(a.x0, a.x1, b.x0, b.x1) / narrower, 0.0, 1.0);
}

/// Even-odd point-in-polygon test, boundary inclusive for axis-aligned edges.
inline bool point_in_polygon(std::span<const Point> poly, Point p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

/// True when segment ab touches the closed axis-aligned box (Liang-Barsky).
inline bool segment_hits_box(Point a, Point b, const BBox& box) {
  double t0 = 0.0, t1 = 1.0;
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - box.x0, box.x1 - a.x, a.y - box.y0, box.y1 - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
    } else {
      const double t = q[i] / p[i];
      if (p[i] < 0.0) {
        t0 = std::max(t0, t);
      } else {
        t1 = std::min(t1, t);
      }
      if (t0 > t1) return false;
    }
  }
  return true;
}

/// Whether `p` lies within Chebyshev distance `radius` of the closed polygon.
inline bool near_polygon(std::span<const Point> poly, Point p, double radius) {
  const BBox probe{p.x - radius, p.y - radius, p.x + radius, p.y + radius};
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (segment_hits_box(poly[j], poly[i], probe)) return true;
  }
  return point_in_polygon(poly, p);
}

}  // namespace imgtrans
