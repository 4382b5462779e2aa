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

#include "gghl/tensors.hpp"

#include <algorithm>
#include <string>

#include "gghl/error.hpp"
#include "gghl/obb_codec.hpp"

namespace gghl {

LabelScale::LabelScale(int stride_, int height, int width, int num_classes_)
    : stride(stride_), num_classes(num_classes_), heat(height, width, 1), obj(height, width, 1),
      obb(height, width, static_cast<int>(kObbChannels)), cls(height, width, num_classes_),
      region_id(height, width, 1), xi(height, width, 1) {
  std::fill(region_id.data().begin(), region_id.data().end(), kBackgroundRegion);
  std::fill(xi.data().begin(), xi.data().end(), 1.0);
}

PredictionScale::PredictionScale(int stride_, int height, int width, int num_classes_)
    : stride(stride_), num_classes(num_classes_), obj_hat(height, width, 1),
      obb_hat(height, width, static_cast<int>(kObbChannels)), cls_hat_raw(height, width, num_classes_) {}

PredictionTensorSet zero_predictions_like(const LabelTensorSet& labels) {
  PredictionTensorSet p;
  for (const auto& s : labels.scales) p.scales.emplace_back(s.stride, s.height(), s.width(), s.num_classes);
  return p;
}

void check_shapes(const LabelTensorSet& labels, const PredictionTensorSet& preds) {
  if (labels.scales.size() != preds.scales.size()) {
    throw Error(ErrorCode::kShapeMismatch, "scale count " + std::to_string(labels.scales.size()) +
                                               " vs " + std::to_string(preds.scales.size()));
  }
  for (std::size_t m = 0; m < labels.scales.size(); ++m) {
    const auto& l = labels.scales[m];
    const auto& p = preds.scales[m];
    const bool ok = l.stride == p.stride && l.num_classes == p.num_classes &&
                    l.height() == p.height() && l.width() == p.width() &&
                    p.obb_hat.height() == l.height() && p.obb_hat.width() == l.width() &&
                    p.cls_hat_raw.height() == l.height() && p.cls_hat_raw.width() == l.width() &&
                    p.cls_hat_raw.channels() == l.num_classes;
    if (!ok) throw Error(ErrorCode::kShapeMismatch, "scale " + std::to_string(m));
  }
}

}  // namespace gghl
