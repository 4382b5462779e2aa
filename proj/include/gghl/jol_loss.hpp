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

#include <string>
#include <vector>

#include "gghl/obb_codec.hpp"
#include "gghl/tensors.hpp"

namespace gghl {

// Predictions are clamped this far inside their open ranges before any log.
inline constexpr double kPredictionClamp = 1e-7;
// |l_hat - l| below this marks a GIoU min/max branch boundary.
inline constexpr double kTieTolerance = 1e-6;

enum class RegressionTerm {
  kGiou,       // 1 - GIoU(l, l_hat) + squared s/ar errors
  kQuadratic,  // sum (l - l_hat)^2 + squared s/ar errors
};

struct LossOptions {
  double gamma = 2.0;
  bool owam_weights = true;        // false forces weight_obb = weight_cls = 1
  bool area_normalization = true;  // false forces xi = 1
  RegressionTerm regression = RegressionTerm::kGiou;
  bool normalize_by_positives = false;  // divide every term by max(1, #positives)
};

/// Box regression loss at one cell: (1 - GIoU) + sum (s - s_hat)^2 + (ar - ar_hat)^2.
double obb_regression_loss(const ObbCode& code, const ObbCode& code_hat,
                           RegressionTerm term = RegressionTerm::kGiou);

/// exp(-loss_obb); 1 for an exact box prediction.
double gcp_confidence(double loss_obb);

struct OwamScale {
  std::vector<double> g;           // 1 at negatives
  std::vector<double> weight_obb;  // 1 at negatives
  std::vector<double> weight_cls;  // 1 at negatives
};

struct OwamField {
  std::vector<OwamScale> scales;
};

/// Per-cell confidence and weights. Both weights are constants with respect
/// to every gradient computed in this module.
OwamField owam_weights(const LabelTensorSet& labels, const PredictionTensorSet& preds);

/// Training-time predictions: obb_hat zeroed at negatives and class scores
/// replaced by obj * G * raw.
PredictionTensorSet compose_training_predictions(const LabelTensorSet& labels, const PredictionTensorSet& preds,
                                                 const OwamField& owam);

struct ScaleLoss {
  double obj_pos = 0.0;
  double obj_neg = 0.0;
  double obb = 0.0;
  double cls = 0.0;
  double total() const { return obj_pos + obj_neg + obb + cls; }
};

struct LossBreakdown {
  double obj_pos = 0.0;
  double obj_neg = 0.0;
  double obb = 0.0;
  double cls = 0.0;
  double total = 0.0;
  long long positives = 0;
  std::vector<ScaleLoss> per_scale;
};

/// Focal objectness, weighted box regression and classification BCE summed
/// over every cell of every scale. Throws Error(kShapeMismatch) or
/// Error(kNonFiniteLoss).
LossBreakdown total_loss(const LabelTensorSet& labels, const PredictionTensorSet& preds,
                         const LossOptions& options = {});

/// Same as total_loss with the confidence/weight field supplied by the caller.
LossBreakdown total_loss(const LabelTensorSet& labels, const PredictionTensorSet& preds, const OwamField& owam,
                         const LossOptions& options);

/// Sum over cells of the log of the per-cell joint density: Bernoulli
/// objectness, i.i.d. Gaussian box error with deviation `sigma` (quadratic in
/// every component), and Bernoulli per-class terms on obj * G * raw.
double joint_log_likelihood(const LabelTensorSet& labels, const PredictionTensorSet& preds, double sigma);

struct GradientResult {
  PredictionTensorSet grad;
  // Set when some l_hat sat within kTieTolerance of its ground truth; the
  // active branch was used for that entry.
  bool tie_point = false;
};

/// Analytic d(total_loss)/d(prediction) with G and both weights held fixed.
GradientResult loss_gradients(const LabelTensorSet& labels, const PredictionTensorSet& preds,
                              const LossOptions& options = {});

struct FiniteDiffReport {
  double max_rel_error = 0.0;
  long long checked = 0;
  long long excluded = 0;
  std::string worst_entry;
};

/// Central differences of the loss (weights frozen at `preds`) against
/// loss_gradients. Relative error is |a - n| / max(|a|, |n|, 1e-6). Entries
/// where a GIoU branch boundary lies within max(1e-6, h) are excluded, as are
/// entries pinned by the prediction clamp. h must lie in [1e-7, 1e-3].
FiniteDiffReport finite_diff_check(const LabelTensorSet& labels, const PredictionTensorSet& preds,
                                   const LossOptions& options, double h);

}  // namespace gghl
