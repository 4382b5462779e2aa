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

#include "gghl/evaluator.hpp"

#include <algorithm>
#include <optional>

#include "gghl/error.hpp"

namespace gghl {

namespace {

struct Candidate {
  std::size_t image = 0;
  std::size_t index = 0;
  double score = 0.0;
};

struct GtBox {
  Obb obb;
  bool difficult = false;
};

}  // namespace

EvalReport evaluate(std::span<const EvalImage> images, int num_classes, double iou_thr) {
  if (num_classes < 1) throw Error(ErrorCode::kInvalidArgument, "num_classes must be positive");
  if (!(iou_thr > 0.0 && iou_thr <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "iou_thr must lie in (0,1]");

  // Canonicalize ground truth once per image.
  std::vector<std::vector<std::optional<GtBox>>> gts(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (const auto& a : images[i].ground_truth) {
      if (a.class_id < 0 || a.class_id >= num_classes) {
        throw Error(ErrorCode::kInvalidArgument, "ground-truth class id out of range");
      }
      gts[i].push_back(GtBox{canonicalize_obb(a.vertices), a.difficult});
    }
  }

  EvalReport report;
  double ap_sum = 0.0;
  for (int cls = 0; cls < num_classes; ++cls) {
    ClassReport cr;
    cr.class_id = cls;
    std::vector<std::vector<bool>> matched(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
      matched[i].assign(gts[i].size(), false);
      for (std::size_t g = 0; g < gts[i].size(); ++g) {
        if (images[i].ground_truth[g].class_id == cls && !gts[i][g]->difficult) ++cr.num_gt;
      }
    }

    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < images.size(); ++i) {
      for (std::size_t d = 0; d < images[i].detections.size(); ++d) {
        if (images[i].detections[d].class_id == cls) cands.push_back({i, d, images[i].detections[d].score});
      }
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.score > b.score; });

    std::vector<double> precision;
    std::vector<bool> is_tp;
    for (const Candidate& c : cands) {
      const Obb& det = images[c.image].detections[c.index].obb;
      double best_iou = -1.0;
      std::size_t best = 0;
      for (std::size_t g = 0; g < gts[c.image].size(); ++g) {
        if (images[c.image].ground_truth[g].class_id != cls) continue;
        if (matched[c.image][g] && !gts[c.image][g]->difficult) continue;
        const double iou = polygon_iou(det, gts[c.image][g]->obb);
        if (iou > best_iou) {
          best_iou = iou;
          best = g;
        }
      }
      if (best_iou >= iou_thr && gts[c.image][best]->difficult) continue;
      const bool tp = best_iou >= iou_thr;
      if (tp) {
        matched[c.image][best] = true;
        ++cr.tp;
      } else {
        ++cr.fp;
      }
      is_tp.push_back(tp);
      const double p = static_cast<double>(cr.tp) / static_cast<double>(cr.tp + cr.fp);
      precision.push_back(p);
      const double r = cr.num_gt > 0 ? static_cast<double>(cr.tp) / static_cast<double>(cr.num_gt) : 0.0;
      cr.pr_curve.emplace_back(r, p);
    }
    cr.fn = cr.num_gt - cr.tp;
    cr.has_ground_truth = cr.num_gt > 0;
    if (cr.has_ground_truth) {
      // Each true positive raises recall by 1/num_gt; weight it by the
      // envelope precision max_{k >= j} p_k.
      double envelope = 0.0;
      double acc = 0.0;
      for (std::size_t j = precision.size(); j-- > 0;) {
        envelope = std::max(envelope, precision[j]);
        if (is_tp[j]) acc += envelope;
      }
      cr.ap = acc / static_cast<double>(cr.num_gt);
      ap_sum += cr.ap;
      ++report.classes_evaluated;
    }
    report.per_class.push_back(std::move(cr));
  }
  report.map = report.classes_evaluated > 0 ? ap_sum / report.classes_evaluated : 0.0;
  return report;
}

EvalReport average_precision(std::span<const Detection> dets, std::span<const ObbAnnotation> gts,
                             int num_classes, double iou_thr) {
  const EvalImage image{{dets.begin(), dets.end()}, {gts.begin(), gts.end()}};
  return evaluate(std::span<const EvalImage>(&image, 1), num_classes, iou_thr);
}

}  // namespace gghl
