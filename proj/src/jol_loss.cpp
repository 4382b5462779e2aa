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

#include "gghl/jol_loss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>

#include "gghl/error.hpp"

namespace gghl {

namespace {

double clamp_prob(double p) { return std::clamp(p, kPredictionClamp, 1.0 - kPredictionClamp); }
bool inside_prob(double p) { return p >= kPredictionClamp && p <= 1.0 - kPredictionClamp; }

struct CellLabel {
  bool positive = false;
  double f = 0.0;
  std::span<const double> obb;
  int gt_class = -1;
  double xi = 1.0;
};

struct CellPred {
  double obj = 0.5;
  std::array<double, kObbChannels> obb{};
  std::span<const double> cls;
};

struct CellWeights {
  double g = 1.0;
  double weight_obb = 1.0;
  double weight_cls = 1.0;
};

CellLabel label_at(const LabelScale& s, std::size_t c) {
  CellLabel out;
  out.positive = s.obj.data()[c] > 0.0;
  out.f = s.heat.data()[c];
  out.obb = s.obb.cell(c);
  out.xi = s.xi.data()[c];
  if (out.positive) {
    const auto cls = s.cls.cell(c);
    out.gt_class = static_cast<int>(std::max_element(cls.begin(), cls.end()) - cls.begin());
  }
  return out;
}

CellPred pred_at(const PredictionScale& s, std::size_t c) {
  CellPred out;
  out.obj = s.obj_hat.data()[c];
  const auto obb = s.obb_hat.cell(c);
  std::copy(obb.begin(), obb.end(), out.obb.begin());
  out.cls = s.cls_hat_raw.cell(c);
  return out;
}

ObbCode clamped_code(std::span<const double, kObbChannels> raw) {
  ObbCode c = ObbCode::from_array(raw);
  for (double& v : c.l) v = std::max(v, kPredictionClamp);
  return c;
}

// GIoU of two edge-distance boxes and its gradient with respect to l_hat.
double giou_with_grad(const EdgeDistances& l, const EdgeDistances& lh, std::array<double, 4>& grad, bool& tie) {
  const double area = (l[0] + l[2]) * (l[1] + l[3]);
  const double area_hat = (lh[0] + lh[2]) * (lh[1] + lh[3]);
  const double ih = std::min(l[0], lh[0]) + std::min(l[2], lh[2]);
  const double iw = std::min(l[1], lh[1]) + std::min(l[3], lh[3]);
  const double ch = std::max(l[0], lh[0]) + std::max(l[2], lh[2]);
  const double cw = std::max(l[1], lh[1]) + std::max(l[3], lh[3]);
  const double inter = ih * iw;
  const double unite = area + area_hat - inter;
  const double circ = ch * cw;

  tie = false;
  for (std::size_t k = 0; k < 4; ++k) {
    if (std::abs(lh[k] - l[k]) < kTieTolerance) tie = true;
    const bool vertical = (k == 0 || k == 2);
    const double d_area_hat = vertical ? (lh[1] + lh[3]) : (lh[0] + lh[2]);
    // min picks l_hat when it is the smaller one, max when it is the larger one.
    const double d_inter = lh[k] < l[k] ? (vertical ? iw : ih) : 0.0;
    const double d_circ = lh[k] > l[k] ? (vertical ? cw : ch) : 0.0;
    const double d_unite = d_area_hat - d_inter;
    // GIoU = I/U - 1 + U/C
    grad[k] = d_inter / unite - inter * d_unite / (unite * unite) + d_unite / circ -
              unite * d_circ / (circ * circ);
  }
  return inter / unite - 1.0 + unite / circ;
}

ScaleLoss cell_terms(const CellLabel& lab, const CellPred& pred, const CellWeights& w, const LossOptions& opt) {
  ScaleLoss t;
  const double o = clamp_prob(pred.obj);
  if (!lab.positive) {
    t.obj_neg = -std::pow(o, opt.gamma) * std::log(1.0 - o);
    return t;
  }
  const double xi = opt.area_normalization ? lab.xi : 1.0;
  const double w_obb = opt.owam_weights ? w.weight_obb : 1.0;
  const double w_cls = opt.owam_weights ? w.weight_cls : 1.0;
  t.obj_pos = -std::pow(1.0 - o, opt.gamma) * std::log(o) * w_obb * xi;

  const ObbCode gt = ObbCode::from_array(std::span<const double, kObbChannels>(lab.obb.data(), kObbChannels));
  const ObbCode hat = clamped_code(pred.obb);
  t.obb = obb_regression_loss(gt, hat, opt.regression) * w_cls * xi;

  double cls = 0.0;
  for (std::size_t c = 0; c < pred.cls.size(); ++c) {
    const double y = static_cast<int>(c) == lab.gt_class ? 1.0 : 0.0;
    const double p = clamp_prob(w.g * clamp_prob(pred.cls[c]));
    cls -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
  }
  t.cls = cls * xi;
  return t;
}

// Gradient of cell_terms(...).total() with respect to the cell predictions.
void cell_grad(const CellLabel& lab, const CellPred& pred, const CellWeights& w, const LossOptions& opt,
               double scale, double& d_obj, std::span<double> d_obb, std::span<double> d_cls, bool& tie) {
  const double g = opt.gamma;
  const double o = clamp_prob(pred.obj);
  const bool obj_free = inside_prob(pred.obj);
  std::fill(d_obb.begin(), d_obb.end(), 0.0);
  std::fill(d_cls.begin(), d_cls.end(), 0.0);
  if (!lab.positive) {
    // d/do [-o^g ln(1-o)]
    const double d = (g == 0.0 ? 0.0 : -g * std::pow(o, g - 1.0) * std::log(1.0 - o)) + std::pow(o, g) / (1.0 - o);
    d_obj = obj_free ? d * scale : 0.0;
    return;
  }
  const double xi = opt.area_normalization ? lab.xi : 1.0;
  const double w_obb = opt.owam_weights ? w.weight_obb : 1.0;
  const double w_cls = opt.owam_weights ? w.weight_cls : 1.0;

  // d/do [-(1-o)^g ln o]
  const double d = (g == 0.0 ? 0.0 : g * std::pow(1.0 - o, g - 1.0) * std::log(o)) - std::pow(1.0 - o, g) / o;
  d_obj = obj_free ? d * w_obb * xi * scale : 0.0;

  const double rw = w_cls * xi * scale;
  const ObbCode gt = ObbCode::from_array(std::span<const double, kObbChannels>(lab.obb.data(), kObbChannels));
  const ObbCode hat = clamped_code(pred.obb);
  if (opt.regression == RegressionTerm::kGiou) {
    std::array<double, 4> dg{};
    bool cell_tie = false;
    giou_with_grad(gt.l, hat.l, dg, cell_tie);
    tie = tie || cell_tie;
    for (std::size_t k = 0; k < 4; ++k) d_obb[k] = -dg[k] * rw;
  } else {
    for (std::size_t k = 0; k < 4; ++k) d_obb[k] = 2.0 * (hat.l[k] - gt.l[k]) * rw;
  }
  for (std::size_t k = 0; k < 4; ++k) {
    if (pred.obb[k] < kPredictionClamp) d_obb[k] = 0.0;
    d_obb[4 + k] = 2.0 * (pred.obb[4 + k] - gt.s[k]) * rw;
  }
  d_obb[8] = 2.0 * (pred.obb[8] - gt.ar) * rw;

  for (std::size_t c = 0; c < pred.cls.size(); ++c) {
    const double y = static_cast<int>(c) == lab.gt_class ? 1.0 : 0.0;
    const double raw = clamp_prob(pred.cls[c]);
    const double p_unclamped = w.g * raw;
    if (!inside_prob(pred.cls[c]) || !inside_prob(p_unclamped)) continue;
    const double p = p_unclamped;
    d_cls[c] = (-y / p + (1.0 - y) / (1.0 - p)) * w.g * xi * scale;
  }
}

long long count_positives(const LabelTensorSet& labels) {
  long long n = 0;
  for (const auto& s : labels.scales) {
    for (double v : s.obj.data()) n += v > 0.0 ? 1 : 0;
  }
  return n;
}

double loss_scale(const LabelTensorSet& labels, const LossOptions& opt) {
  if (!opt.normalize_by_positives) return 1.0;
  return 1.0 / static_cast<double>(std::max<long long>(1, count_positives(labels)));
}

CellWeights weights_at(const OwamField& owam, std::size_t m, std::size_t c) {
  const OwamScale& s = owam.scales[m];
  return {s.g[c], s.weight_obb[c], s.weight_cls[c]};
}

void check_owam(const LabelTensorSet& labels, const OwamField& owam) {
  bool ok = owam.scales.size() == labels.scales.size();
  for (std::size_t m = 0; ok && m < labels.scales.size(); ++m) {
    const std::size_t n = labels.scales[m].heat.cells();
    const OwamScale& s = owam.scales[m];
    ok = s.g.size() == n && s.weight_obb.size() == n && s.weight_cls.size() == n;
  }
  if (!ok) throw Error(ErrorCode::kShapeMismatch, "weight field does not match labels");
}

}  // namespace

double obb_regression_loss(const ObbCode& code, const ObbCode& code_hat, RegressionTerm term) {
  double loss = 0.0;
  if (term == RegressionTerm::kGiou) {
    loss = 1.0 - hbb_giou(code.l, code_hat.l);
  } else {
    for (std::size_t k = 0; k < 4; ++k) loss += (code.l[k] - code_hat.l[k]) * (code.l[k] - code_hat.l[k]);
  }
  for (std::size_t k = 0; k < 4; ++k) loss += (code.s[k] - code_hat.s[k]) * (code.s[k] - code_hat.s[k]);
  loss += (code.ar - code_hat.ar) * (code.ar - code_hat.ar);
  return loss;
}

double gcp_confidence(double loss_obb) { return std::exp(-loss_obb); }

OwamField owam_weights(const LabelTensorSet& labels, const PredictionTensorSet& preds) {
  check_shapes(labels, preds);
  OwamField field;
  for (std::size_t m = 0; m < labels.scales.size(); ++m) {
    const LabelScale& ls = labels.scales[m];
    const PredictionScale& ps = preds.scales[m];
    const std::size_t n = ls.heat.cells();
    OwamScale out{std::vector<double>(n, 1.0), std::vector<double>(n, 1.0), std::vector<double>(n, 1.0)};
    for (std::size_t c = 0; c < n; ++c) {
      const CellLabel lab = label_at(ls, c);
      if (!lab.positive) continue;
      const CellPred pred = pred_at(ps, c);
      const ObbCode gt = ObbCode::from_array(std::span<const double, kObbChannels>(lab.obb.data(), kObbChannels));
      const double g = gcp_confidence(obb_regression_loss(gt, clamped_code(pred.obb)));
      out.g[c] = g;
      out.weight_obb[c] = 0.5 * (lab.f + g);
      out.weight_cls[c] = 0.5 * (lab.f + clamp_prob(pred.cls[static_cast<std::size_t>(lab.gt_class)]));
    }
    field.scales.push_back(std::move(out));
  }
  return field;
}

PredictionTensorSet compose_training_predictions(const LabelTensorSet& labels, const PredictionTensorSet& preds,
                                                 const OwamField& owam) {
  check_shapes(labels, preds);
  check_owam(labels, owam);
  PredictionTensorSet out = preds;
  for (std::size_t m = 0; m < labels.scales.size(); ++m) {
    const LabelScale& ls = labels.scales[m];
    PredictionScale& ps = out.scales[m];
    for (std::size_t c = 0; c < ls.heat.cells(); ++c) {
      const double obj = ls.obj.data()[c] > 0.0 ? 1.0 : 0.0;
      for (double& v : ps.obb_hat.cell(c)) v *= obj;
      const double factor = obj * owam.scales[m].g[c];
      for (double& v : ps.cls_hat_raw.cell(c)) v *= factor;
    }
  }
  return out;
}

LossBreakdown total_loss(const LabelTensorSet& labels, const PredictionTensorSet& preds, const LossOptions& options) {
  return total_loss(labels, preds, owam_weights(labels, preds), options);
}

LossBreakdown total_loss(const LabelTensorSet& labels, const PredictionTensorSet& preds, const OwamField& owam,
                         const LossOptions& options) {
  check_shapes(labels, preds);
  check_owam(labels, owam);
  if (!(options.gamma >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be >= 0");
  const double scale = loss_scale(labels, options);
  LossBreakdown out;
  out.positives = count_positives(labels);
  for (std::size_t m = 0; m < labels.scales.size(); ++m) {
    const LabelScale& ls = labels.scales[m];
    const PredictionScale& ps = preds.scales[m];
    ScaleLoss acc;
    for (std::size_t c = 0; c < ls.heat.cells(); ++c) {
      const ScaleLoss t = cell_terms(label_at(ls, c), pred_at(ps, c), weights_at(owam, m, c), options);
      acc.obj_pos += t.obj_pos;
      acc.obj_neg += t.obj_neg;
      acc.obb += t.obb;
      acc.cls += t.cls;
    }
    acc.obj_pos *= scale;
    acc.obj_neg *= scale;
    acc.obb *= scale;
    acc.cls *= scale;
    out.obj_pos += acc.obj_pos;
    out.obj_neg += acc.obj_neg;
    out.obb += acc.obb;
    out.cls += acc.cls;
    out.per_scale.push_back(acc);
  }
  out.total = out.obj_pos + out.obj_neg + out.obb + out.cls;
  for (double v : {out.obj_pos, out.obj_neg, out.obb, out.cls, out.total}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteLoss, "loss term is not finite");
  }
  return out;
}

double joint_log_likelihood(const LabelTensorSet& labels, const PredictionTensorSet& preds, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  const OwamField owam = owam_weights(labels, preds);
  const double log_norm = -std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  double ll = 0.0;
  for (std::size_t m = 0; m < labels.scales.size(); ++m) {
    const LabelScale& ls = labels.scales[m];
    const PredictionScale& ps = preds.scales[m];
    for (std::size_t c = 0; c < ls.heat.cells(); ++c) {
      const CellLabel lab = label_at(ls, c);
      const CellPred pred = pred_at(ps, c);
      const double obj = lab.positive ? 1.0 : 0.0;
      const double o = clamp_prob(pred.obj);
      ll += obj * std::log(o) + (1.0 - obj) * std::log(1.0 - o);

      // At negatives both the target and the masked prediction are zero.
      double sq = 0.0;
      if (lab.positive) {
        const ObbCode gt = ObbCode::from_array(std::span<const double, kObbChannels>(lab.obb.data(), kObbChannels));
        sq = obb_regression_loss(gt, clamped_code(pred.obb), RegressionTerm::kQuadratic);
      }
      ll += log_norm - sq * inv_two_var;

      const double g = owam.scales[m].g[c];
      for (std::size_t k = 0; k < pred.cls.size(); ++k) {
        const double y = static_cast<int>(k) == lab.gt_class ? 1.0 : 0.0;
        const double p = clamp_prob(obj * g * clamp_prob(pred.cls[k]));
        ll += y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
      }
    }
  }
  if (!std::isfinite(ll)) throw Error(ErrorCode::kNonFiniteLoss, "log-likelihood is not finite");
  return ll;
}

GradientResult loss_gradients(const LabelTensorSet& labels, const PredictionTensorSet& preds,
                              const LossOptions& options) {
  check_shapes(labels, preds);
  const OwamField owam = owam_weights(labels, preds);
  const double scale = loss_scale(labels, options);
  GradientResult out;
  out.grad = zero_predictions_like(labels);
  for (std::size_t m = 0; m < labels.scales.size(); ++m) {
    const LabelScale& ls = labels.scales[m];
    const PredictionScale& ps = preds.scales[m];
    PredictionScale& gs = out.grad.scales[m];
    for (std::size_t c = 0; c < ls.heat.cells(); ++c) {
      cell_grad(label_at(ls, c), pred_at(ps, c), weights_at(owam, m, c), options, scale,
                gs.obj_hat.data()[c], gs.obb_hat.cell(c), gs.cls_hat_raw.cell(c), out.tie_point);
    }
  }
  return out;
}

FiniteDiffReport finite_diff_check(const LabelTensorSet& labels, const PredictionTensorSet& preds,
                                   const LossOptions& options, double h) {
  if (!(h >= 1e-7 && h <= 1e-3)) throw Error(ErrorCode::kInvalidArgument, "h must lie in [1e-7, 1e-3]");
  check_shapes(labels, preds);
  const OwamField owam = owam_weights(labels, preds);
  const GradientResult analytic = loss_gradients(labels, preds, options);
  const double scale = loss_scale(labels, options);
  const double boundary = std::max(kTieTolerance, h);

  FiniteDiffReport report;
  for (std::size_t m = 0; m < labels.scales.size(); ++m) {
    const LabelScale& ls = labels.scales[m];
    const PredictionScale& ps = preds.scales[m];
    const PredictionScale& gs = analytic.grad.scales[m];
    const std::size_t num_cls = static_cast<std::size_t>(ps.num_classes);
    for (std::size_t c = 0; c < ls.heat.cells(); ++c) {
      const CellLabel lab = label_at(ls, c);
      const CellWeights w = weights_at(owam, m, c);
      const CellPred base = pred_at(ps, c);
      std::vector<double> cls(base.cls.begin(), base.cls.end());

      // Entry e: 0 = objectness, 1..9 = box, 10.. = classes.
      for (std::size_t e = 0; e < 1 + kObbChannels + num_cls; ++e) {
        auto value_ref = [&](CellPred& p, std::vector<double>& cl) -> double& {
          if (e == 0) return p.obj;
          if (e <= kObbChannels) return p.obb[e - 1];
          return cl[e - 1 - kObbChannels];
        };
        const double x = e == 0 ? base.obj : e <= kObbChannels ? base.obb[e - 1] : cls[e - 1 - kObbChannels];
        bool skip = false;
        if (e == 0 || e > kObbChannels) {
          skip = x - h < kPredictionClamp || x + h > 1.0 - kPredictionClamp;
        } else if (e <= 4) {
          skip = x - h < kPredictionClamp || (lab.positive && std::abs(x - lab.obb[e - 1]) < boundary);
        }
        if (e > kObbChannels && lab.positive) {
          const double gx = w.g * x;
          skip = skip || gx - w.g * h < kPredictionClamp || gx + w.g * h > 1.0 - kPredictionClamp;
        }
        if (skip) {
          ++report.excluded;
          continue;
        }
        auto eval = [&](double v) {
          CellPred p = base;
          std::vector<double> cl = cls;
          value_ref(p, cl) = v;
          p.cls = cl;
          return cell_terms(lab, p, w, options).total() * scale;
        };
        const double numeric = (eval(x + h) - eval(x - h)) / (2.0 * h);
        const double a = e == 0 ? gs.obj_hat.data()[c]
                         : e <= kObbChannels ? gs.obb_hat.cell(c)[e - 1]
                                             : gs.cls_hat_raw.cell(c)[e - 1 - kObbChannels];
        const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
        ++report.checked;
        if (rel > report.max_rel_error) {
          report.max_rel_error = rel;
          std::ostringstream os;
          os << "scale " << m << " cell " << c << " entry " << e << " analytic " << a << " numeric " << numeric;
          report.worst_entry = os.str();
        }
      }
    }
  }
  return report;
}

}  // namespace gghl
