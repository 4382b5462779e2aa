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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gghl/evaluator.hpp"
#include "gghl/synthetic.hpp"

using namespace gghl;

namespace {

ObbAnnotation gt_box(Point2 c, double w, double h, double t, int cls, bool difficult = false) {
  ObbAnnotation a;
  a.vertices = rotated_rect(c, w, h, t);
  a.class_id = cls;
  a.difficult = difficult;
  return a;
}

// VOC-style AP from an independent matcher: mrec/mpre padding, envelope,
// then sum of recall steps times precision.
double reference_ap(const std::vector<Detection>& dets, const std::vector<ObbAnnotation>& gts, int cls,
                    double thr) {
  std::vector<Detection> d;
  for (const auto& x : dets) {
    if (x.class_id == cls) d.push_back(x);
  }
  std::stable_sort(d.begin(), d.end(), [](const Detection& a, const Detection& b) { return a.score > b.score; });
  std::vector<int> used(gts.size(), 0);
  int npos = 0;
  for (const auto& g : gts) npos += g.class_id == cls && !g.difficult;
  if (npos == 0) return -1;
  std::vector<double> tp, fp;
  for (const auto& x : d) {
    double best = -1;
    int arg = -1;
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (gts[j].class_id != cls || (used[j] && !gts[j].difficult)) continue;
      const double iou = polygon_iou(x.obb, canonicalize_obb(gts[j].vertices));
      if (iou > best) {
        best = iou;
        arg = static_cast<int>(j);
      }
    }
    if (best >= thr && gts[static_cast<std::size_t>(arg)].difficult) continue;
    const bool hit = best >= thr;
    if (hit) used[static_cast<std::size_t>(arg)] = 1;
    tp.push_back(hit);
    fp.push_back(!hit);
  }
  std::vector<double> mrec{0.0}, mpre{0.0};
  double ctp = 0, cfp = 0;
  for (std::size_t i = 0; i < tp.size(); ++i) {
    ctp += tp[i];
    cfp += fp[i];
    mrec.push_back(ctp / npos);
    mpre.push_back(ctp / (ctp + cfp));
  }
  mrec.push_back(1.0);
  mpre.push_back(0.0);
  for (std::size_t i = mpre.size() - 1; i > 0; --i) mpre[i - 1] = std::max(mpre[i - 1], mpre[i]);
  double ap = 0;
  for (std::size_t i = 1; i < mrec.size(); ++i) ap += (mrec[i] - mrec[i - 1]) * mpre[i];
  return ap;
}

struct Scene {
  std::vector<ObbAnnotation> gts;
  std::vector<Detection> dets;
};

Scene synthetic_scene(Rng& rng, int objects, int false_positives, int classes) {
  Scene s;
  s.gts = random_scene(rng, 400, objects, classes, 15, 80);
  for (auto& g : s.gts) g.difficult = rng.uniform() < 0.1;
  for (const auto& g : s.gts) {
    if (rng.uniform() < 0.15) continue;  // missed
    std::array<Point2, 4> v = g.vertices;
    const Point2 jitter{rng.uniform(-6, 6), rng.uniform(-6, 6)};
    for (auto& p : v) p = p + jitter;
    s.dets.push_back({canonicalize_obb(v), g.class_id, rng.uniform(0.05, 1)});
  }
  for (int i = 0; i < false_positives; ++i) {
    s.dets.push_back({canonicalize_obb(rotated_rect({rng.uniform(20, 380), rng.uniform(20, 380)}, rng.uniform(10, 60),
                                                    rng.uniform(10, 60), rng.uniform(0, 3))),
                      rng.integer(0, classes - 1), rng.uniform(0.05, 1)});
  }
  return s;
}

}  // namespace

TEST_CASE("perfect detections score AP 1 for every class") {
  Rng rng(81);
  const auto gts = random_scene(rng, 800, 25, 4, 10, 200);
  std::vector<Detection> dets;
  for (const auto& g : gts) dets.push_back({canonicalize_obb(g.vertices), g.class_id, rng.uniform(0.1, 1)});
  const EvalReport r = average_precision(dets, gts, 5, 0.5);
  for (const auto& c : r.per_class) {
    if (c.has_ground_truth) CHECK(c.ap == 1.0);
  }
  CHECK(r.map == 1.0);
}

TEST_CASE("no detections give AP 0; classes without ground truth are excluded") {
  const std::vector<ObbAnnotation> gts{gt_box({50, 50}, 20, 10, 0, 0)};
  const EvalReport r = average_precision({}, gts, 2, 0.5);
  CHECK(r.per_class[0].ap == 0.0);
  CHECK(r.per_class[0].fn == 1);
  CHECK_FALSE(r.per_class[1].has_ground_truth);
  CHECK(r.classes_evaluated == 1);
  CHECK(r.map == 0.0);
}

TEST_CASE("difficult boxes neither count nor penalize") {
  const std::vector<ObbAnnotation> gts{gt_box({50, 50}, 20, 10, 0, 0), gt_box({150, 50}, 20, 10, 0, 0, true)};
  const std::vector<Detection> dets{{canonicalize_obb(gts[0].vertices), 0, 0.9},
                                    {canonicalize_obb(gts[1].vertices), 0, 0.8}};
  const EvalReport r = average_precision(dets, gts, 1, 0.5);
  CHECK(r.per_class[0].num_gt == 1);
  CHECK(r.per_class[0].tp == 1);
  CHECK(r.per_class[0].fp == 0);
  CHECK(r.map == 1.0);
}

TEST_CASE("AP matches the reference on synthetic scenes") {
  Rng rng(82);
  for (int trial = 0; trial < 50; ++trial) {
    const Scene s = synthetic_scene(rng, 10, 3, 2);
    for (double thr : {0.3, 0.5, 0.7}) {
      const EvalReport r = average_precision(s.dets, s.gts, 2, thr);
      for (const auto& c : r.per_class) {
        const double ref = reference_ap(s.dets, s.gts, c.class_id, thr);
        if (ref < 0) {
          CHECK_FALSE(c.has_ground_truth);
          continue;
        }
        CHECK(c.ap == doctest::Approx(ref).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("AP properties: threshold monotonicity, score-transform invariance, one-to-one matching") {
  Rng rng(83);
  for (int trial = 0; trial < 30; ++trial) {
    Scene s = synthetic_scene(rng, 15, 5, 3);
    double prev = 2.0;
    for (double thr : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double m = average_precision(s.dets, s.gts, 3, thr).map;
      CHECK(m <= prev + 1e-15);
      prev = m;
    }
    const EvalReport base = average_precision(s.dets, s.gts, 3, 0.5);
    for (auto& d : s.dets) d.score = std::exp(3 * d.score) / 50;
    const EvalReport moved = average_precision(s.dets, s.gts, 3, 0.5);
    CHECK(moved.map == base.map);
    for (const auto& c : base.per_class) {
      CHECK(c.tp <= c.num_gt);
      CHECK(c.tp + c.fn == c.num_gt);
    }
  }
}

TEST_CASE("multi-image evaluation pools detections across images") {
  const auto g0 = gt_box({50, 50}, 30, 20, 0.2, 0);
  const auto g1 = gt_box({50, 50}, 30, 20, 0.2, 0);
  std::vector<EvalImage> images(2);
  images[0].ground_truth = {g0};
  images[1].ground_truth = {g1};
  images[0].detections = {{canonicalize_obb(g0.vertices), 0, 0.9}};
  images[1].detections = {{canonicalize_obb(rotated_rect({200, 200}, 30, 20, 0)), 0, 0.95}};
  const EvalReport r = evaluate(images, 1, 0.5);
  CHECK(r.per_class[0].tp == 1);
  CHECK(r.per_class[0].fp == 1);
  CHECK(r.per_class[0].ap == doctest::Approx(0.25).epsilon(1e-15));
}
