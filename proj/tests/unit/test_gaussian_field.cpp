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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gghl/error.hpp"
#include "gghl/gaussian_field.hpp"
#include "gghl/synthetic.hpp"

using namespace gghl;
using std::numbers::pi;

namespace {

Obb rect(Point2 c, double w, double h, double theta) { return canonicalize_obb(rotated_rect(c, w, h, theta)); }

double fold(double a) {
  a = std::fmod(a, pi);
  return a < 0 ? a + pi : a;
}

double angle_gap(double a, double b) {
  const double d = std::abs(fold(a) - fold(b));
  return std::min(d, pi - d);
}

// Closed-form eigen-decomposition of a symmetric 2x2 matrix.
struct Eigen2 {
  double l1, l2, angle;
};
Eigen2 eig(const std::array<double, 4>& m) {
  const double a = m[0], b = m[1], c = m[3];
  const double mid = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  return {mid + rad, mid - rad, fold(0.5 * std::atan2(2 * b, a - c))};
}

}  // namespace

TEST_CASE("axis-aligned 40x20 box at stride 8") {
  const GaussianRegion r = region_from_obb(rect({100, 60}, 40, 20, 0), 8, 0.3);
  CHECK(r.mu.x == doctest::Approx(12.5).epsilon(1e-12));
  CHECK(r.mu.y == doctest::Approx(7.5).epsilon(1e-12));
  CHECK(r.alpha == doctest::Approx(0.0));
  CHECK(r.lambda1 == doctest::Approx(6.25).epsilon(1e-12));
  CHECK(r.lambda2 == doctest::Approx(1.5625).epsilon(1e-12));
  CHECK(r.shrink == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(r.thr == doctest::Approx(std::exp(-0.06125)).epsilon(1e-15));
  CHECK(r.thr == doctest::Approx(0.94059).epsilon(1e-5));
}

TEST_CASE("square box: equal eigenvalues, angle from the first canonical side") {
  const Obb sq = rect({50, 50}, 16, 16, 0.3);
  const GaussianRegion r = region_from_obb(sq, 8, 0.3);
  CHECK(r.lambda1 == doctest::Approx(r.lambda2).epsilon(1e-12));
  const Point2 d = sq[1] - sq[0];
  CHECK(angle_gap(r.alpha, std::atan2(d.y, d.x)) <= 1e-12);
}

TEST_CASE("rotating the box shifts alpha and keeps the eigenvalues") {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const double w = rng.uniform(20, 90), h = rng.uniform(5, 19), beta = rng.uniform(0, 2 * pi);
    const GaussianRegion base = region_from_obb(rect({200, 200}, w, h, 0), 16, 0.3);
    const GaussianRegion rot = region_from_obb(rect({200, 200}, w, h, beta), 16, 0.3);
    CHECK(rot.lambda1 == doctest::Approx(base.lambda1).epsilon(1e-12));
    CHECK(rot.lambda2 == doctest::Approx(base.lambda2).epsilon(1e-12));
    CHECK(angle_gap(rot.alpha, base.alpha + beta) <= 1e-9);
    CHECK(rot.alpha >= 0.0);
    CHECK(rot.alpha < pi);
  }
}

TEST_CASE("gaussian value: peak and unit Mahalanobis distance") {
  const GaussianRegion r = region_from_obb(rect({120, 80}, 64, 24, 0.7), 8, 0.3);
  CHECK(gaussian_value(r, r.mu) == 1.0);
  const Point2 end = r.mu + Point2{std::cos(r.alpha), std::sin(r.alpha)} * r.semi_major();
  CHECK(gaussian_value(r, end) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(gaussian_value(r, end) == doctest::Approx(0.60653).epsilon(1e-5));
}

TEST_CASE("gaussian value is invariant under joint rotation") {
  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    const double w = rng.uniform(20, 90), h = rng.uniform(5, 19), beta = rng.uniform(0, pi);
    const GaussianRegion r0 = region_from_obb(rect({160, 160}, w, h, 0), 8, 0.3);
    const GaussianRegion r = region_from_obb(rect({160, 160}, w, h, beta), 8, 0.3);
    const double da = r.alpha - r0.alpha;
    for (int k = 0; k < 10; ++k) {
      const Point2 v{rng.uniform(-4, 4), rng.uniform(-4, 4)};
      const Point2 qv{std::cos(da) * v.x - std::sin(da) * v.y, std::sin(da) * v.x + std::cos(da) * v.y};
      const double a = gaussian_value(r, r.mu + qv);
      const double b = gaussian_value(r0, r0.mu + v);
      CHECK(std::abs(a - b) <= 1e-10 * std::max(a, b));
    }
  }
}

TEST_CASE("threshold membership equals the shrunk ellipse") {
  Rng rng(23);
  for (int i = 0; i < 50; ++i) {
    const GaussianRegion r =
        region_from_obb(rect({200, 200}, rng.uniform(30, 200), rng.uniform(10, 60), rng.uniform(0, pi)), 8, 0.3);
    for (int k = 0; k < 200; ++k) {
      const Point2 p = r.mu + Point2{rng.uniform(-3, 3), rng.uniform(-3, 3)};
      const double m = mahalanobis_sq(r, p);
      if (std::abs(m - r.shrink * r.shrink) < 1e-12) continue;
      CHECK((gaussian_value(r, p) >= r.thr) == (m <= r.shrink * r.shrink));
    }
  }
}

TEST_CASE("gaussian value strictly decreases along rays") {
  const GaussianRegion r = region_from_obb(rect({100, 100}, 80, 30, 1.1), 8, 0.3);
  Rng rng(24);
  for (int i = 0; i < 50; ++i) {
    const double t = rng.uniform(0, 2 * pi);
    double prev = gaussian_value(r, r.mu);
    for (int k = 1; k <= 40; ++k) {
      const double v = gaussian_value(r, r.mu + Point2{std::cos(t), std::sin(t)} * (0.1 * k));
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("covariance eigen-decomposition reproduces the region") {
  Rng rng(25);
  for (int i = 0; i < 200; ++i) {
    const double w = rng.uniform(20, 200), h = rng.uniform(5, 0.95 * w);
    const GaussianRegion r = region_from_obb(rect({300, 300}, w, h, rng.uniform(0, pi)), 8, 0.3);
    const auto c = r.covariance();
    CHECK(c[1] == c[2]);
    const Eigen2 e = eig(c);
    CHECK(e.l2 > 0.0);
    CHECK(std::abs(e.l1 - r.lambda1) <= 1e-9 * r.lambda1);
    CHECK(std::abs(e.l2 - r.lambda2) <= 1e-9 * r.lambda1);
    CHECK(angle_gap(e.angle, r.alpha) <= 1e-9);
  }
}

TEST_CASE("shrunk radii") {
  const auto [a, b] = shrunk_radii(10, 10, 0.3);
  CHECK(a == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(b == doctest::Approx(3.5).epsilon(1e-15));
  const auto [c, d] = shrunk_radii(10, 4, 1 - 1e-12);
  CHECK(c < 1e-10);
  CHECK(d < 1e-10);
  CHECK(shrink_factor(0.3) == doctest::Approx(0.35).epsilon(1e-15));
}

TEST_CASE("degenerate semi-axis is rejected") {
  bool thrown = false;
  try {
    region_from_obb(canonicalize_obb(std::array<Point2, 4>{{{0, 0}, {1000, 0}, {1000, 1e-5}, {0, 1e-5}}}), 8, 0.3);
  } catch (const Error& e) {
    thrown = e.code() == ErrorCode::kDegenerateBox;
  }
  CHECK(thrown);
}
