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
#include <utility>
#include <vector>

#include "gghl/decoder.hpp"
#include "gghl/tensors.hpp"

namespace gghl {

struct EvalImage {
  std::vector<Detection> detections;
  std::vector<ObbAnnotation> ground_truth;
};

struct ClassReport {
  int class_id = 0;
  bool has_ground_truth = false;  // false: excluded from the mean
  double ap = 0.0;
  long long num_gt = 0;  // difficult boxes excluded
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  std::vector<std::pair<double, double>> pr_curve;  // (recall, precision) after each detection
};

struct EvalReport {
  std::vector<ClassReport> per_class;
  double map = 0.0;
  int classes_evaluated = 0;
};

// Detections are visited by descending score (stable), each matched to the
// unmatched ground-truth box of its class and image with the highest
// polygon IoU >= iou_thr. A detection whose best match is a difficult box is
// ignored. AP is the area under the precision envelope (all points).
EvalReport evaluate(std::span<const EvalImage> images, int num_classes, double iou_thr);

EvalReport average_precision(std::span<const Detection> dets, std::span<const ObbAnnotation> gts,
                             int num_classes, double iou_thr);

}  // namespace gghl
