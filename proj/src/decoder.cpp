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

#include "gghl/decoder.hpp"

#include <algorithm>
#include <numeric>

#include "gghl/error.hpp"

namespace gghl {

std::vector<Detection> decode_predictions(const PredictionTensorSet& preds, double conf,
                                          const DecodeOptions& options) {
  if (!(conf > 0.0 && conf < 1.0)) throw Error(ErrorCode::kInvalidArgument, "conf must lie in (0,1)");
  std::vector<Detection> out;
  for (const auto& scale : preds.scales) {
    const int w = scale.width();
    for (std::size_t c = 0; c < scale.obj_hat.cells(); ++c) {
      const double obj = scale.obj_hat.data()[c];
      const auto cls = scale.cls_hat_raw.cell(c);
      const auto best = std::max_element(cls.begin(), cls.end());
      const double score = options.score_mode == ScoreMode::kObjectness ? obj : obj * *best;
      if (!(score >= conf)) continue;

      ObbCode code = ObbCode::from_array(std::span<const double, kObbChannels>(scale.obb_hat.cell(c).data(), kObbChannels));
      // Network outputs are projected into the valid code ranges.
      for (double& v : code.l) v = std::max(v, 1e-6);
      for (double& v : code.s) v = std::clamp(v, 0.0, 1.0);
      code.ar = std::clamp(code.ar, 1e-6, 1.0);
      const Cell cell{static_cast<int>(c % w), static_cast<int>(c / w)};
      out.push_back({decode_at(code, cell, scale.stride, options.codec),
                     static_cast<int>(best - cls.begin()), score});
    }
  }
  return out;
}

std::vector<Detection> rotated_nms(std::span<const Detection> dets, double iou_thr) {
  if (!(iou_thr > 0.0 && iou_thr < 1.0)) throw Error(ErrorCode::kInvalidArgument, "iou_thr must lie in (0,1)");
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    return dets[a].class_id < dets[b].class_id;
  });
  std::vector<Detection> kept;
  for (std::size_t i : order) {
    const Detection& d = dets[i];
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return k.class_id == d.class_id && polygon_iou(k.obb, d.obb) > iou_thr;
    });
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

}  // namespace gghl
