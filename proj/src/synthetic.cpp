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

#include "gghl/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gghl {

std::array<Point2, 4> rotated_rect(Point2 c, double w, double h, double theta) {
  const Point2 u{std::cos(theta) * w / 2, std::sin(theta) * w / 2};
  const Point2 v{-std::sin(theta) * h / 2, std::cos(theta) * h / 2};
  return {c - u - v, c + u - v, c + u + v, c - u + v};
}

std::vector<ObbAnnotation> random_scene(Rng& rng, int img_size, int count, int num_classes, double min_side,
                                        double max_side, bool disjoint) {
  std::vector<ObbAnnotation> out;
  out.reserve(static_cast<std::size_t>(count));
  const double img = img_size;
  while (static_cast<int>(out.size()) < count) {
    const double w = rng.uniform(min_side, std::min(max_side, img * 0.9));
    const double h = rng.uniform(min_side, std::min(max_side, img * 0.9));
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double rx = 0.5 * (std::abs(std::cos(theta)) * w + std::abs(std::sin(theta)) * h);
    const double ry = 0.5 * (std::abs(std::sin(theta)) * w + std::abs(std::cos(theta)) * h);
    if (2 * rx >= img || 2 * ry >= img) continue;
    const Point2 c{rng.uniform(rx, img - rx), rng.uniform(ry, img - ry)};
    if (disjoint) {
      const Hbb mine{c.x - rx, c.y - ry, c.x + rx, c.y + ry};
      const bool hit = std::any_of(out.begin(), out.end(), [&](const ObbAnnotation& o) {
        const Hbb h = circumscribed_hbb(canonicalize_obb(o.vertices));
        return mine.x_min < h.x_max && h.x_min < mine.x_max && mine.y_min < h.y_max && h.y_min < mine.y_max;
      });
      if (hit) continue;
    }
    ObbAnnotation a;
    a.vertices = rotated_rect(c, w, h, theta);
    a.class_id = rng.integer(0, num_classes - 1);
    out.push_back(a);
  }
  return out;
}

LabelTensorSet random_label_set(Rng& rng, int num_scales, int size, int num_classes) {
  LabelTensorSet labels;
  for (int m = 0; m < num_scales; ++m) {
    LabelScale s(8 << m, size, size, num_classes);
    const int positives = rng.integer(3, 12);
    for (int k = 0; k < positives; ++k) {
      const std::size_t c = static_cast<std::size_t>(rng.integer(0, size * size - 1));
      if (s.obj.data()[c] > 0) continue;
      s.obj.data()[c] = 1.0;
      s.heat.data()[c] = rng.uniform(0.05, 1.0);
      auto code = s.obb.cell(c);
      for (int j = 0; j < 4; ++j) code[j] = rng.uniform(0.5, 6.0);
      for (int j = 4; j < 8; ++j) code[j] = rng.uniform(0.0, 1.0);
      code[8] = rng.uniform(0.3, 1.0);
      s.cls.cell(c)[static_cast<std::size_t>(rng.integer(0, num_classes - 1))] = 1.0;
      s.region_id.data()[c] = k;
      s.xi.data()[c] = std::log(2.0) / std::log(1.0 + std::sqrt(static_cast<double>(rng.integer(1, 40))));
    }
    labels.scales.push_back(std::move(s));
  }
  return labels;
}

PredictionTensorSet random_predictions(Rng& rng, const LabelTensorSet& labels, double lo) {
  PredictionTensorSet preds = zero_predictions_like(labels);
  for (std::size_t m = 0; m < preds.scales.size(); ++m) {
    auto& p = preds.scales[m];
    const auto& l = labels.scales[m];
    for (auto& v : p.obj_hat.data()) v = rng.uniform(lo, 1 - lo);
    for (auto& v : p.cls_hat_raw.data()) v = rng.uniform(lo, 1 - lo);
    for (std::size_t c = 0; c < p.obj_hat.cells(); ++c) {
      auto dst = p.obb_hat.cell(c);
      const auto src = l.obb.cell(c);
      const bool positive = l.obj.data()[c] > 0;
      for (int j = 0; j < 4; ++j) dst[j] = positive ? src[j] * rng.uniform(0.6, 1.5) : rng.uniform(0.5, 6.0);
      for (int j = 4; j < 9; ++j) dst[j] = rng.uniform(0.0, 1.0);
    }
  }
  return preds;
}

PredictionTensorSet perfect_predictions(const LabelTensorSet& labels) {
  PredictionTensorSet preds = zero_predictions_like(labels);
  for (std::size_t m = 0; m < preds.scales.size(); ++m) {
    auto& p = preds.scales[m];
    const auto& l = labels.scales[m];
    p.obj_hat.data() = l.obj.data();
    p.obb_hat.data() = l.obb.data();
    p.cls_hat_raw.data() = l.cls.data();
  }
  return preds;
}

}  // namespace gghl
