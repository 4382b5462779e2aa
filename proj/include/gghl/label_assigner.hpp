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

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "gghl/tensors.hpp"

namespace gghl {

struct AssignConfig {
  std::array<int, 3> strides{8, 16, 32};
  double tau = 3.0;
  double t_iou = 0.3;
  int img_size = 800;
  int num_classes = 1;

  /// Throws Error(kInvalidArgument) when an invariant is violated.
  void validate() const;

  /// Upper bounds (pixels, inclusive) of the first two routing ranges.
  double range1() const;
  double range2() const;
};

/// Index into cfg.strides for an object whose longest side is `max_side`
/// pixels. Throws Error(kSideOutOfRange) above sqrt(2) * img_size and
/// Error(kInvalidArgument) for max_side <= 1.
std::size_t route_scale(double max_side, const AssignConfig& cfg);

/// Area normalization ln 2 / ln(1 + sqrt(n)) for a region of n positive
/// cells; n is clamped to >= 1.
double area_normalization(double n);

/// Cells below the density threshold are background; a retained cell whose
/// rescaled weight would round to zero gets this floor instead.
inline constexpr double kMinPositiveWeight = 1e-6;

struct AssignDiagnostics {
  // Annotation indices that ended up without any positive cell.
  std::vector<int> empty_regions;
  // Annotation indices whose shrunk ellipse contained no cell center. Each got
  // the single densest cell whose center lies strictly inside its box, at the
  // routed stride or, failing that, the nearest finer one.
  std::vector<int> fallback_regions;
};

/// Builds the per-scale ground truth for one image.
///
/// Each annotation is routed to one scale, its shrunk Gaussian ellipse is
/// scanned over the cells of its bounding rectangle, and cells whose density
/// reaches the region threshold become candidates. A contested cell goes to
/// the region with the larger raw density (the earlier annotation on an exact
/// tie). Retained densities are then rescaled per region to (f - thr) / (1 - thr).
///
/// Throws Error(kInvalidAnnotation) for degenerate, tiny or out-of-image boxes
/// and for class ids outside [0, num_classes).
LabelTensorSet generate_heatmaps(std::span<const ObbAnnotation> annotations, const AssignConfig& cfg,
                                 AssignDiagnostics* diagnostics = nullptr);

struct ScaleBalance {
  int stride = 0;
  long long positives = 0;
  long long negatives = 0;
  double ratio = 0.0;  // positives / negatives, 0 when there are no negatives
};

struct AssignmentStats {
  std::vector<long long> per_object_positives;
  std::vector<ScaleBalance> per_scale;
  int mismatch = 0;  // objects with zero positive cells
  std::array<long long, 10> heat_histogram{};  // F at positives, bins of width 0.1 over (0,1]
};

AssignmentStats assignment_stats(const LabelTensorSet& labels, std::span<const ObbAnnotation> annotations);

}  // namespace gghl
