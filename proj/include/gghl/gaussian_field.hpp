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
#include <utility>

#include "gghl/geometry.hpp"

namespace gghl {

/// Oriented 2-D Gaussian attached to one box, in grid units (pixels / stride).
///
/// The covariance is C = Q diag(lambda1, lambda2) Q^T with Q the rotation by
/// `alpha`; sqrt(lambda_i) are the semi-axes (half the box side lengths). The
/// positive region is the ellipse scaled by `shrink`, i.e. the set where the
/// unnormalized density reaches `thr` = exp(-shrink^2 / 2).
struct GaussianRegion {
  Point2 mu;
  double alpha = 0.0;    // [0, pi), direction of the major axis
  double lambda1 = 1.0;  // >= lambda2
  double lambda2 = 1.0;
  double shrink = 0.35;
  double thr = 0.0;

  double semi_major() const;
  double semi_minor() const;
  /// Row-major 2x2 covariance matrix.
  std::array<double, 4> covariance() const;
};

/// Builds the region for `obb` on a feature map with the given stride.
/// Throws Error(kDegenerateBox) if a semi-axis is below 1e-6 grid units and
/// Error(kInvalidArgument) for stride <= 0 or t_iou outside (0, 1).
GaussianRegion region_from_obb(const Obb& obb, int stride, double t_iou);

/// Squared Mahalanobis distance of `p` (grid units) from the region mean.
double mahalanobis_sq(const GaussianRegion& region, Point2 p);

/// exp(-m/2): the density without its normalizing prefactor, 1 at the mean.
double gaussian_value(const GaussianRegion& region, Point2 p);

/// Candidate-region radii: each radius scaled by (1 - t_iou) / 2.
std::pair<double, double> shrunk_radii(double r1, double r2, double t_iou);

/// Shrink factor (1 - t_iou) / 2 applied to the semi-axes.
double shrink_factor(double t_iou);

}  // namespace gghl
