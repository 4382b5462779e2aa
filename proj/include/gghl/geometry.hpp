// Copyright (c) 2026 The gghl Authors. All rights reserved.
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

#include <array>
#include <span>

namespace gghl {

// Image-pixel coordinates: x grows to the right, y grows downwards.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

/// Oriented bounding box with vertices in canonical order.
///
/// Canonical order starts at the vertex on the top edge of the circumscribed
/// horizontal box (smallest y, leftmost on tie) and walks clockwise as seen on
/// screen (y down), i.e. top -> right -> bottom -> left for a rotated
/// rectangle. In that order the shoelace sum is positive.
///
/// Only canonicalize_obb() produces instances.
class Obb {
 public:
  const std::array<Point2, 4>& vertices() const noexcept { return vertices_; }
  const Point2& operator[](std::size_t i) const noexcept { return vertices_[i]; }

  friend bool operator==(const Obb&, const Obb&) = default;

 private:
  friend Obb canonicalize_obb(std::span<const Point2, 4> raw);
  std::array<Point2, 4> vertices_{};
};

struct Hbb {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }
};

/// Distances from a reference point to the top, right, bottom and left edges
/// of a horizontal box, in that order.
using EdgeDistances = std::array<double, 4>;

struct ObbMetrics {
  std::array<double, 4> sides{};  // d_j, side j runs from vertex j to j+1
  double area = 0.0;
  double max_side = 0.0;
};

inline constexpr double kDegenerateArea = 1e-6;
inline constexpr double kMergeDistance = 1e-9;

/// Reorders four vertices into canonical order.
/// Throws Error(kDegenerateBox) for |area| < 1e-6 px^2 and Error(kNonConvex)
/// when the turn directions mix (includes self-intersecting input).
Obb canonicalize_obb(std::span<const Point2, 4> raw);
inline Obb canonicalize_obb(const std::array<Point2, 4>& raw) {
  return canonicalize_obb(std::span<const Point2, 4>(raw));
}

Hbb circumscribed_hbb(const Obb& obb);

/// Signed shoelace area; positive for screen-clockwise order.
double signed_area(std::span<const Point2> polygon);

ObbMetrics obb_metrics(const Obb& obb);

bool contains(const Obb& obb, Point2 p);

// IoU/GIoU of two horizontal boxes that share a reference point, each given by
// its edge distances from that point. Throws Error(kInvalidDistances) if a
// component is negative or a box has zero extent.
double hbb_iou(const EdgeDistances& l, const EdgeDistances& l_hat);
double hbb_giou(const EdgeDistances& l, const EdgeDistances& l_hat);

// Coordinate forms; these accept arbitrary (including disjoint) boxes.
double hbb_iou(const Hbb& a, const Hbb& b);
double hbb_giou(const Hbb& a, const Hbb& b);

/// Exact IoU of two convex quadrilaterals via half-plane clipping.
double polygon_iou(const Obb& a, const Obb& b);

/// Pixel-counting IoU over the joint bounding region sampled on a grid x grid
/// lattice. Test oracle only; grid must be >= 256.
double rasterized_iou(const Obb& a, const Obb& b, int grid);

/// Pixel-counting area of one box, sampled on a grid x grid lattice over its
/// own circumscribed box.
double rasterized_area(const Obb& a, int grid);

}  // namespace gghl
