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

#include <span>
#include <vector>

#include "gghl/obb_codec.hpp"
#include "gghl/tensors.hpp"

namespace gghl {

inline constexpr double kDefaultConfidence = 0.2;
inline constexpr double kDefaultNmsThreshold = 0.45;

struct Detection {
  Obb obb;
  int class_id = 0;
  double score = 0.0;
};

enum class ScoreMode {
  kObjectnessTimesClass,  // obj_hat * max_c cls_hat_raw
  kObjectness,            // obj_hat alone
};

struct DecodeOptions {
  ScoreMode score_mode = ScoreMode::kObjectnessTimesClass;
  CodecOptions codec;
};

/// One detection per cell whose score reaches `conf`, in scale then
/// row-major cell order. Throws Error(kInvalidArgument) for conf outside (0,1).
std::vector<Detection> decode_predictions(const PredictionTensorSet& preds, double conf,
                                          const DecodeOptions& options = {});

/// Greedy class-wise suppression. Candidates are visited by descending score
/// (ties: lower class id, then input order); one is kept iff its IoU with every
/// kept detection of the same class is <= iou_thr.
std::vector<Detection> rotated_nms(std::span<const Detection> dets, double iou_thr);

}  // namespace gghl
