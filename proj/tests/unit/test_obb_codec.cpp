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
#include "gghl/obb_codec.hpp"
#include "gghl/synthetic.hpp"

using namespace gghl;

namespace {

Obb quad(std::array<Point2, 4> v) { return canonicalize_obb(v); }

double max_vertex_error(const Obb& a, const Obb& b) {
  double e = 0;
  for (std::size_t k = 0; k < 4; ++k) e = std::max(e, std::hypot(a[k].x - b[k].x, a[k].y - b[k].y));
  return e;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

}  // namespace

TEST_CASE("axis-aligned encode example") {
  const Obb o = quad({{{100, 100}, {180, 100}, {180, 140}, {100, 140}}});
  const Point2 c = cell_center({17, 15}, 8);
  CHECK(c == Point2{140, 124});
  const ObbCode code = encode_at(o, {17, 15}, 8);
  CHECK(code.l == EdgeDistances{3, 5, 2, 5});
  CHECK(code.s == std::array<double, 4>{0, 0, 0, 0});
  CHECK(code.ar == 1.0);

  const Obb back = decode_at(code, {17, 15}, 8);
  CHECK(back == o);
}

TEST_CASE("symmetric cell in a square HBB") {
  const Obb sq = quad({{{96, 96}, {160, 96}, {160, 160}, {96, 160}}});
  const ObbCode code = encode_at(sq, {15, 15}, 8);
  CHECK(code.l[0] + code.l[2] == 8.0);
  const Obb centred = quad({{{96, 96}, {144, 96}, {144, 144}, {96, 144}}});
  const ObbCode mid = encode_at(centred, {7, 7}, 16);  // center (120, 120)
  CHECK(mid.l[0] == doctest::Approx(1.5));
  CHECK(mid.l[0] == mid.l[2]);
  CHECK(mid.l[1] == mid.l[3]);
}

TEST_CASE("diamond inscribed in its HBB") {
  const Obb d = quad({{{40, 0}, {80, 40}, {40, 80}, {0, 40}}});
  const ObbCode code = encode_at(d, {2, 2}, 16);
  for (double s : code.s) CHECK(s == 0.5);
  CHECK(code.ar == 0.5);
}

TEST_CASE("zero gliding decodes to HBB corners; opt-in HBB fallback") {
  ObbCode code;
  code.l = {1, 2, 3, 4};
  code.s = {0, 0, 0, 0};
  code.ar = 1.0;
  const Obb o = decode_at(code, {10, 10}, 8);
  const Point2 c = cell_center({10, 10}, 8);
  CHECK(o == quad({{{c.x - 32, c.y - 8}, {c.x + 16, c.y - 8}, {c.x + 16, c.y + 24}, {c.x - 32, c.y + 24}}}));

  code.s = {0.2, 0.1, 0.3, 0.05};
  code.ar = 0.95;
  CodecOptions fallback;
  fallback.hbb_fallback_ar = 0.9;
  CHECK(decode_at(code, {10, 10}, 8, fallback) == o);
  CHECK_FALSE(decode_at(code, {10, 10}, 8) == o);
}

TEST_CASE("codec errors") {
  const Obb o = quad({{{100, 100}, {180, 100}, {180, 140}, {100, 140}}});
  CHECK(code_of([&] { encode_at(o, {0, 0}, 8); }) == ErrorCode::kCellOutsideBox);
  ObbCode bad;
  bad.l = {1, 1, 1, 1};
  bad.s = {0, 1.5, 0, 0};
  CHECK(code_of([&] { decode_at(bad, {3, 3}, 8); }) == ErrorCode::kInvalidCode);
  bad.s = {0, 0, 0, 0};
  bad.l = {0, 1, 0, 1};
  CHECK(code_of([&] { decode_at(bad, {3, 3}, 8); }) == ErrorCode::kInvalidCode);
  bad.l = {1, 1, 1, 1};
  bad.ar = 0.0;
  CHECK(code_of([&] { decode_at(bad, {3, 3}, 8); }) == ErrorCode::kInvalidCode);
}

TEST_CASE("roundtrip at every interior cell, translation equivariance, area ratio") {
  Rng rng(41);
  const std::array<int, 3> strides{8, 16, 32};
  double worst = 0;
  for (int i = 0; i < 300; ++i) {
    const int stride = strides[static_cast<std::size_t>(i % 3)];
    const Obb o = canonicalize_obb(rotated_rect({rng.uniform(200, 400), rng.uniform(200, 400)},
                                                rng.uniform(10, 300), rng.uniform(10, 300),
                                                rng.uniform(0, std::numbers::pi)));
    const Hbb h = circumscribed_hbb(o);
    const double ar = obb_metrics(o).area / h.area();
    for (int y = static_cast<int>(h.y_min / stride); y * stride <= h.y_max; ++y) {
      for (int x = static_cast<int>(h.x_min / stride); x * stride <= h.x_max; ++x) {
        const Point2 c = cell_center({x, y}, stride);
        if (!(c.x > h.x_min && c.x < h.x_max && c.y > h.y_min && c.y < h.y_max)) continue;
        const ObbCode code = encode_at(o, {x, y}, stride);
        CHECK(std::abs(code.ar - ar) <= 1e-12);
        worst = std::max(worst, max_vertex_error(decode_at(code, {x, y}, stride), o));
      }
    }
    // Shift by whole strides together with the cell.
    const Point2 mid{(h.x_min + h.x_max) / 2, (h.y_min + h.y_max) / 2};
    const Cell cell{static_cast<int>(mid.x / stride), static_cast<int>(mid.y / stride)};
    const Point2 cc = cell_center(cell, stride);
    if (!(cc.x > h.x_min && cc.x < h.x_max && cc.y > h.y_min && cc.y < h.y_max)) continue;
    const int dx = rng.integer(-3, 3), dy = rng.integer(-3, 3);
    std::array<Point2, 4> moved = o.vertices();
    for (auto& p : moved) p = p + Point2{dx * static_cast<double>(stride), dy * static_cast<double>(stride)};
    const ObbCode a = encode_at(o, cell, stride);
    const ObbCode b = encode_at(canonicalize_obb(moved), {cell.x + dx, cell.y + dy}, stride);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::abs(a.l[k] - b.l[k]) <= 1e-12);
      CHECK(std::abs(a.s[k] - b.s[k]) <= 1e-12);
    }
    CHECK(std::abs(a.ar - b.ar) <= 1e-12);
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("code array layout and one-hot") {
  ObbCode c;
  c.l = {1, 2, 3, 4};
  c.s = {0.1, 0.2, 0.3, 0.4};
  c.ar = 0.5;
  const auto arr = c.to_array();
  CHECK(arr == std::array<double, 9>{1, 2, 3, 4, 0.1, 0.2, 0.3, 0.4, 0.5});
  const ObbCode back = ObbCode::from_array(arr);
  CHECK(back.l == c.l);
  CHECK(back.s == c.s);
  CHECK(back.ar == c.ar);
  CHECK(one_hot(2, 4) == std::vector<double>{0, 0, 1, 0});
}
