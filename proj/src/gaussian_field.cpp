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

#include "gghl/gaussian_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gghl/error.hpp"

namespace gghl {

namespace {

constexpr double kMinSemiAxis = 1e-6;
constexpr double kSideTieTolerance = 1e-9;

Point2 area_centroid(const Obb& obb) {
  // Fan triangulation from vertex 0.
  double area = 0.0;
  Point2 acc;
  for (std::size_t i = 1; i + 1 < 4; ++i) {
    const double a = 0.5 * cross(obb[i] - obb[0], obb[i + 1] - obb[0]);
    const Point2 c = (obb[0] + obb[i] + obb[i + 1]) * (1.0 / 3.0);
    acc = acc + c * a;
    area += a;
  }
  return acc * (1.0 / area);
}

double fold_angle(double a) {
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

}  // namespace

double GaussianRegion::semi_major() const { return std::sqrt(lambda1); }
double GaussianRegion::semi_minor() const { return std::sqrt(lambda2); }

std::array<double, 4> GaussianRegion::covariance() const {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  const double xx = c * c * lambda1 + s * s * lambda2;
  const double yy = s * s * lambda1 + c * c * lambda2;
  const double xy = c * s * (lambda1 - lambda2);
  return {xx, xy, xy, yy};
}

double shrink_factor(double t_iou) { return (1.0 - t_iou) / 2.0; }

std::pair<double, double> shrunk_radii(double r1, double r2, double t_iou) {
  const double k = shrink_factor(t_iou);
  return {k * r1, k * r2};
}

GaussianRegion region_from_obb(const Obb& obb, int stride, double t_iou) {
  if (stride <= 0) throw Error(ErrorCode::kInvalidArgument, "stride must be positive");
  if (!(t_iou > 0.0 && t_iou < 1.0)) throw Error(ErrorCode::kInvalidArgument, "t_iou outside (0,1)");

  const ObbMetrics m = obb_metrics(obb);
  // Opposite sides are averaged so that near-rectangular quads behave.
  const double len0 = 0.5 * (m.sides[0] + m.sides[2]);
  const double len1 = 0.5 * (m.sides[1] + m.sides[3]);
  const bool first_is_major = len0 >= len1 - kSideTieTolerance * std::max(len0, len1);
  const std::size_t side = first_is_major ? 0 : 1;
  const Point2 dir = obb[side + 1] - obb[side];

  const double inv = 1.0 / stride;
  const double s1 = 0.5 * (first_is_major ? len0 : len1) * inv;
  const double s2 = 0.5 * (first_is_major ? len1 : len0) * inv;
  if (s1 < kMinSemiAxis || s2 < kMinSemiAxis) {
    throw Error(ErrorCode::kDegenerateBox, "semi-axis below 1e-6 grid units");
  }

  GaussianRegion r;
  r.mu = area_centroid(obb) * inv;
  r.alpha = fold_angle(std::atan2(dir.y, dir.x));
  r.lambda1 = s1 * s1;
  r.lambda2 = s2 * s2;
  r.shrink = shrink_factor(t_iou);
  r.thr = std::exp(-0.5 * r.shrink * r.shrink);
  return r;
}

double mahalanobis_sq(const GaussianRegion& region, Point2 p) {
  const double dx = p.x - region.mu.x;
  const double dy = p.y - region.mu.y;
  const double c = std::cos(region.alpha);
  const double s = std::sin(region.alpha);
  // u = Q^T (p - mu)
  const double u1 = c * dx + s * dy;
  const double u2 = -s * dx + c * dy;
  return u1 * u1 / region.lambda1 + u2 * u2 / region.lambda2;
}

double gaussian_value(const GaussianRegion& region, Point2 p) {
  return std::exp(-0.5 * mahalanobis_sq(region, p));
}

}  // namespace gghl
