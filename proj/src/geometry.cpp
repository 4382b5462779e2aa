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

#include "gghl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gghl/error.hpp"

namespace gghl {

namespace {

// Vertices within this y-distance of the minimum count as lying on the top edge.
constexpr double kTopTieTolerance = 1e-9;

bool all_finite(std::span<const Point2, 4> pts) {
  return std::all_of(pts.begin(), pts.end(),
                     [](const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); });
}

// Sutherland-Hodgman step: keep the part of `poly` on the inner side of the
// directed edge p->q (inner = left turn in screen-clockwise polygons).
std::vector<Point2> clip_half_plane(const std::vector<Point2>& poly, Point2 p, Point2 q) {
  std::vector<Point2> out;
  if (poly.empty()) return out;
  out.reserve(poly.size() + 2);
  const Point2 edge = q - p;
  auto side = [&](Point2 v) { return cross(edge, v - p); };
  auto push = [&](Point2 v) {
    if (!out.empty()) {
      const Point2 d = v - out.back();
      if (std::abs(d.x) < kMergeDistance && std::abs(d.y) < kMergeDistance) return;
    }
    out.push_back(v);
  };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 cur = poly[i];
    const Point2 nxt = poly[(i + 1) % poly.size()];
    const double sc = side(cur);
    const double sn = side(nxt);
    if (sc >= 0.0) push(cur);
    if ((sc >= 0.0) != (sn >= 0.0)) {
      const double t = sc / (sc - sn);
      push(cur + (nxt - cur) * t);
    }
  }
  if (out.size() > 1) {
    const Point2 d = out.front() - out.back();
    if (std::abs(d.x) < kMergeDistance && std::abs(d.y) < kMergeDistance) out.pop_back();
  }
  return out;
}

// x-interval of a convex polygon on the horizontal line y = yc.
bool row_interval(const Obb& box, double yc, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2 a = box[i];
    const Point2 b = box[(i + 1) % 4];
    const double y0 = std::min(a.y, b.y);
    const double y1 = std::max(a.y, b.y);
    if (yc < y0 || yc > y1) continue;
    if (y1 == y0) {
      lo = std::min({lo, a.x, b.x});
      hi = std::max({hi, a.x, b.x});
      continue;
    }
    const double t = (yc - a.y) / (b.y - a.y);
    const double x = a.x + t * (b.x - a.x);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return lo <= hi;
}

// Number of samples x0 + (j + 0.5) * dx, j in [0, n), inside [lo, hi].
long long count_samples(double lo, double hi, double x0, double dx, int n) {
  if (lo > hi) return 0;
  const double first = std::ceil((lo - x0) / dx - 0.5);
  const double last = std::floor((hi - x0) / dx - 0.5);
  const double a = std::max(first, 0.0);
  const double b = std::min(last, static_cast<double>(n - 1));
  return b >= a ? static_cast<long long>(b - a) + 1 : 0;
}

void check_distances(const EdgeDistances& l) {
  for (double v : l) {
    if (!(v >= 0.0)) throw Error(ErrorCode::kInvalidDistances, "negative edge distance");
  }
  if (!(l[0] + l[2] > 0.0) || !(l[1] + l[3] > 0.0)) {
    throw Error(ErrorCode::kInvalidDistances, "box has zero extent");
  }
}

}  // namespace

double signed_area(std::span<const Point2> polygon) {
  double acc = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) acc += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * acc;
}

Obb canonicalize_obb(std::span<const Point2, 4> raw) {
  if (!all_finite(raw)) throw Error(ErrorCode::kInvalidArgument, "non-finite vertex");
  std::array<Point2, 4> v{raw[0], raw[1], raw[2], raw[3]};
  const double area = signed_area(v);
  if (std::abs(area) < kDegenerateArea) {
    throw Error(ErrorCode::kDegenerateBox, "area " + std::to_string(area) + " px^2");
  }
  if (area < 0.0) std::reverse(v.begin(), v.end());

  // Every turn must agree with the (now positive) orientation.
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2 e0 = v[(i + 1) % 4] - v[i];
    const Point2 e1 = v[(i + 2) % 4] - v[(i + 1) % 4];
    if (cross(e0, e1) < 0.0) throw Error(ErrorCode::kNonConvex, "turn directions mix");
  }

  double y_top = v[0].y;
  for (const auto& p : v) y_top = std::min(y_top, p.y);
  std::size_t start = 4;
  for (std::size_t i = 0; i < 4; ++i) {
    if (v[i].y > y_top + kTopTieTolerance) continue;
    if (start == 4 || v[i].x < v[start].x) start = i;
  }
  Obb out;
  for (std::size_t i = 0; i < 4; ++i) out.vertices_[i] = v[(start + i) % 4];
  return out;
}

Hbb circumscribed_hbb(const Obb& obb) {
  Hbb h{obb[0].x, obb[0].y, obb[0].x, obb[0].y};
  for (const auto& p : obb.vertices()) {
    h.x_min = std::min(h.x_min, p.x);
    h.y_min = std::min(h.y_min, p.y);
    h.x_max = std::max(h.x_max, p.x);
    h.y_max = std::max(h.y_max, p.y);
  }
  return h;
}

ObbMetrics obb_metrics(const Obb& obb) {
  ObbMetrics m;
  for (std::size_t j = 0; j < 4; ++j) {
    const Point2 d = obb[(j + 1) % 4] - obb[j];
    m.sides[j] = std::hypot(d.x, d.y);
    m.max_side = std::max(m.max_side, m.sides[j]);
  }
  m.area = signed_area(obb.vertices());
  return m;
}

bool contains(const Obb& obb, Point2 p) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (cross(obb[(i + 1) % 4] - obb[i], p - obb[i]) < 0.0) return false;
  }
  return true;
}

double hbb_iou(const EdgeDistances& l, const EdgeDistances& l_hat) {
  check_distances(l);
  check_distances(l_hat);
  const double area = (l[0] + l[2]) * (l[1] + l[3]);
  const double area_hat = (l_hat[0] + l_hat[2]) * (l_hat[1] + l_hat[3]);
  const double overlap = (std::min(l[0], l_hat[0]) + std::min(l[2], l_hat[2])) *
                         (std::min(l[1], l_hat[1]) + std::min(l[3], l_hat[3]));
  return std::clamp(overlap / (area + area_hat - overlap), 0.0, 1.0);
}

double hbb_giou(const EdgeDistances& l, const EdgeDistances& l_hat) {
  const double iou = hbb_iou(l, l_hat);
  const double area = (l[0] + l[2]) * (l[1] + l[3]);
  const double area_hat = (l_hat[0] + l_hat[2]) * (l_hat[1] + l_hat[3]);
  const double overlap = (std::min(l[0], l_hat[0]) + std::min(l[2], l_hat[2])) *
                         (std::min(l[1], l_hat[1]) + std::min(l[3], l_hat[3]));
  const double circ = (std::max(l[0], l_hat[0]) + std::max(l[2], l_hat[2])) *
                      (std::max(l[1], l_hat[1]) + std::max(l[3], l_hat[3]));
  const double unite = area + area_hat - overlap;
  // circ >= union mathematically; clamp the rounding residue.
  return iou - std::max(0.0, circ - unite) / circ;
}

double hbb_iou(const Hbb& a, const Hbb& b) {
  const double iw = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double ih = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = iw * ih;
  const double unite = a.area() + b.area() - inter;
  if (!(unite > 0.0)) throw Error(ErrorCode::kInvalidDistances, "boxes have zero area");
  return std::clamp(inter / unite, 0.0, 1.0);
}

double hbb_giou(const Hbb& a, const Hbb& b) {
  const double iou = hbb_iou(a, b);
  const double iw = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double ih = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double unite = a.area() + b.area() - iw * ih;
  const double circ = (std::max(a.x_max, b.x_max) - std::min(a.x_min, b.x_min)) *
                      (std::max(a.y_max, b.y_max) - std::min(a.y_min, b.y_min));
  // circ >= union mathematically; clamp the rounding residue.
  return iou - std::max(0.0, circ - unite) / circ;
}

double polygon_iou(const Obb& a, const Obb& b) {
  if (a == b) return 1.0;
  std::vector<Point2> poly(b.vertices().begin(), b.vertices().end());
  for (std::size_t i = 0; i < 4 && poly.size() >= 3; ++i) {
    poly = clip_half_plane(poly, a[i], a[(i + 1) % 4]);
  }
  const double inter = poly.size() >= 3 ? std::max(0.0, signed_area(poly)) : 0.0;
  const double area_a = signed_area(a.vertices());
  const double area_b = signed_area(b.vertices());
  return std::clamp(inter / (area_a + area_b - inter), 0.0, 1.0);
}

double rasterized_iou(const Obb& a, const Obb& b, int grid) {
  if (grid < 256) throw Error(ErrorCode::kInvalidArgument, "grid must be >= 256");
  const Hbb ha = circumscribed_hbb(a);
  const Hbb hb = circumscribed_hbb(b);
  const double x0 = std::min(ha.x_min, hb.x_min);
  const double y0 = std::min(ha.y_min, hb.y_min);
  const double dx = (std::max(ha.x_max, hb.x_max) - x0) / grid;
  const double dy = (std::max(ha.y_max, hb.y_max) - y0) / grid;
  long long in_a = 0;
  long long in_b = 0;
  long long in_both = 0;
  for (int r = 0; r < grid; ++r) {
    const double yc = y0 + (r + 0.5) * dy;
    double la = 0, ra = 0, lb = 0, rb = 0;
    const bool hit_a = row_interval(a, yc, la, ra);
    const bool hit_b = row_interval(b, yc, lb, rb);
    if (hit_a) in_a += count_samples(la, ra, x0, dx, grid);
    if (hit_b) in_b += count_samples(lb, rb, x0, dx, grid);
    if (hit_a && hit_b) in_both += count_samples(std::max(la, lb), std::min(ra, rb), x0, dx, grid);
  }
  const long long unite = in_a + in_b - in_both;
  return unite > 0 ? static_cast<double>(in_both) / static_cast<double>(unite) : 0.0;
}

double rasterized_area(const Obb& a, int grid) {
  if (grid < 256) throw Error(ErrorCode::kInvalidArgument, "grid must be >= 256");
  const Hbb h = circumscribed_hbb(a);
  const double dx = h.width() / grid;
  const double dy = h.height() / grid;
  long long count = 0;
  for (int r = 0; r < grid; ++r) {
    double lo = 0, hi = 0;
    if (row_interval(a, h.y_min + (r + 0.5) * dy, lo, hi)) {
      count += count_samples(lo, hi, h.x_min, dx, grid);
    }
  }
  return static_cast<double>(count) * dx * dy;
}

}  // namespace gghl
