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

#include "gghl/obb_codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gghl/error.hpp"

namespace gghl {

Point2 cell_center(Cell cell, int stride) {
  return {(cell.x + 0.5) * stride, (cell.y + 0.5) * stride};
}

std::array<double, kObbChannels> ObbCode::to_array() const {
  return {l[0], l[1], l[2], l[3], s[0], s[1], s[2], s[3], ar};
}

ObbCode ObbCode::from_array(std::span<const double, kObbChannels> v) {
  ObbCode c;
  std::copy_n(v.begin(), 4, c.l.begin());
  std::copy_n(v.begin() + 4, 4, c.s.begin());
  c.ar = v[8];
  return c;
}

ObbCode encode_at(const Obb& obb, Cell cell, int stride) {
  const Hbb h = circumscribed_hbb(obb);
  const Point2 c = cell_center(cell, stride);
  if (!(c.x > h.x_min && c.x < h.x_max && c.y > h.y_min && c.y < h.y_max)) {
    throw Error(ErrorCode::kCellOutsideBox,
                "cell (" + std::to_string(cell.x) + "," + std::to_string(cell.y) + ")");
  }
  const double inv = 1.0 / stride;
  const double w = h.width();
  const double ht = h.height();

  ObbCode code;
  code.l = {(c.y - h.y_min) * inv, (h.x_max - c.x) * inv, (h.y_max - c.y) * inv,
            (c.x - h.x_min) * inv};
  code.s = {std::clamp((obb[0].x - h.x_min) / w, 0.0, 1.0),
            std::clamp((obb[1].y - h.y_min) / ht, 0.0, 1.0),
            std::clamp((h.x_max - obb[2].x) / w, 0.0, 1.0),
            std::clamp((h.y_max - obb[3].y) / ht, 0.0, 1.0)};
  code.ar = std::clamp(obb_metrics(obb).area / h.area(), 0.0, 1.0);
  return code;
}

Obb decode_at(const ObbCode& code, Cell cell, int stride, const CodecOptions& options) {
  for (double v : code.to_array()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidCode, "non-finite component");
  }
  for (double v : code.l) {
    if (v < 0.0) throw Error(ErrorCode::kInvalidCode, "negative edge distance");
  }
  if (!(code.l[0] + code.l[2] > 0.0) || !(code.l[1] + code.l[3] > 0.0)) {
    throw Error(ErrorCode::kInvalidCode, "zero-extent box");
  }
  for (double v : code.s) {
    if (v < 0.0 || v > 1.0) throw Error(ErrorCode::kInvalidCode, "gliding ratio outside [0,1]");
  }
  if (!(code.ar > 0.0 && code.ar <= 1.0)) throw Error(ErrorCode::kInvalidCode, "area ratio outside (0,1]");

  const Point2 c = cell_center(cell, stride);
  const Hbb h{c.x - code.l[3] * stride, c.y - code.l[0] * stride, c.x + code.l[1] * stride,
              c.y + code.l[2] * stride};
  const double w = h.width();
  const double ht = h.height();
  const std::array<Point2, 4> corners{Point2{h.x_min, h.y_min}, Point2{h.x_max, h.y_min},
                                      Point2{h.x_max, h.y_max}, Point2{h.x_min, h.y_max}};
  if (code.ar >= options.hbb_fallback_ar) return canonicalize_obb(corners);

  const std::array<Point2, 4> glided{Point2{h.x_min + code.s[0] * w, h.y_min},
                                     Point2{h.x_max, h.y_min + code.s[1] * ht},
                                     Point2{h.x_max - code.s[2] * w, h.y_max},
                                     Point2{h.x_min, h.y_max - code.s[3] * ht}};
  // Gliding along the HBB edges keeps the quad convex; it can only collapse.
  if (std::abs(signed_area(glided)) < kDegenerateArea) return canonicalize_obb(corners);
  return canonicalize_obb(glided);
}

std::vector<double> one_hot(int class_id, int num_classes) {
  if (class_id < 0 || class_id >= num_classes) {
    throw Error(ErrorCode::kInvalidArgument, "class id " + std::to_string(class_id) + " out of range");
  }
  std::vector<double> v(static_cast<std::size_t>(num_classes), 0.0);
  v[static_cast<std::size_t>(class_id)] = 1.0;
  return v;
}

}  // namespace gghl
