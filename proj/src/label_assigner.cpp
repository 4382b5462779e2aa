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

#include "gghl/label_assigner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gghl/error.hpp"
#include "gghl/gaussian_field.hpp"
#include "gghl/obb_codec.hpp"

namespace gghl {

namespace {

// Label tensors are serialized as float32; keep them exactly representable.
double f32(double v) { return static_cast<double>(static_cast<float>(v)); }

struct RegionInfo {
  Obb obb;
  GaussianRegion gauss;
  std::size_t scale = 0;
  bool fallback = false;
};

struct ScaleScratch {
  std::vector<double> best;
  std::vector<int> owner;
};

Obb checked_obb(const ObbAnnotation& ann, int index, const AssignConfig& cfg) {
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::kInvalidAnnotation, "annotation " + std::to_string(index) + ": " + why);
  };
  if (ann.class_id < 0 || ann.class_id >= cfg.num_classes) throw fail("class id out of range");
  for (const auto& p : ann.vertices) {
    if (!(p.x >= 0.0 && p.x <= cfg.img_size && p.y >= 0.0 && p.y <= cfg.img_size)) {
      throw fail("vertex outside the image");
    }
  }
  try {
    return canonicalize_obb(ann.vertices);
  } catch (const Error& e) {
    throw fail(e.what());
  }
}

struct CellWindow {
  int x0, y0, x1, y1;
};

CellWindow cell_window(const Hbb& box, int stride, int n) {
  const double inv = 1.0 / stride;
  return {std::max(0, static_cast<int>(std::floor(box.x_min * inv))),
          std::max(0, static_cast<int>(std::floor(box.y_min * inv))),
          std::min(n - 1, static_cast<int>(std::ceil(box.x_max * inv))),
          std::min(n - 1, static_cast<int>(std::ceil(box.y_max * inv)))};
}

bool strictly_inside(const Hbb& box, Point2 p) {
  return p.x > box.x_min && p.x < box.x_max && p.y > box.y_min && p.y < box.y_max;
}

}  // namespace

void AssignConfig::validate() const {
  auto fail = [](const std::string& why) { return Error(ErrorCode::kInvalidArgument, why); };
  for (std::size_t i = 0; i < strides.size(); ++i) {
    if (strides[i] <= 0) throw fail("strides must be positive");
    if (i > 0 && strides[i] <= strides[i - 1]) throw fail("strides must be strictly increasing");
    if (img_size <= 0 || img_size % strides[i] != 0) throw fail("img_size must be divisible by every stride");
  }
  if (!(tau > 0.0)) throw fail("tau must be positive");
  if (!(t_iou > 0.0 && t_iou < 1.0)) throw fail("t_iou must lie in (0,1)");
  if (num_classes < 1) throw fail("num_classes must be positive");
}

double AssignConfig::range1() const { return tau * 2.0 * strides[0] / (1.0 - t_iou); }
double AssignConfig::range2() const { return tau * 2.0 * strides[2] / (1.0 - t_iou); }

std::size_t route_scale(double max_side, const AssignConfig& cfg) {
  if (!(max_side > 1.0)) throw Error(ErrorCode::kInvalidArgument, "max side must exceed 1 px");
  if (max_side > std::numbers::sqrt2 * cfg.img_size) {
    throw Error(ErrorCode::kSideOutOfRange, "max side " + std::to_string(max_side) + " px");
  }
  if (max_side <= cfg.range1()) return 0;
  if (max_side <= cfg.range2()) return 1;
  return 2;
}

double area_normalization(double n) {
  return std::numbers::ln2 / std::log(1.0 + std::sqrt(std::max(n, 1.0)));
}

LabelTensorSet generate_heatmaps(std::span<const ObbAnnotation> annotations, const AssignConfig& cfg,
                                 AssignDiagnostics* diagnostics) {
  cfg.validate();
  LabelTensorSet out;
  std::vector<ScaleScratch> scratch;
  for (int stride : cfg.strides) {
    const int n = cfg.img_size / stride;
    out.scales.emplace_back(stride, n, n, cfg.num_classes);
    scratch.push_back({std::vector<double>(static_cast<std::size_t>(n) * n,
                                           -std::numeric_limits<double>::infinity()),
                       std::vector<int>(static_cast<std::size_t>(n) * n, -1)});
  }

  std::vector<RegionInfo> regions;
  regions.reserve(annotations.size());
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const int idx = static_cast<int>(i);
    const Obb obb = checked_obb(annotations[i], idx, cfg);
    const double max_side = obb_metrics(obb).max_side;
    if (!(max_side > 1.0)) {
      throw Error(ErrorCode::kInvalidAnnotation, "annotation " + std::to_string(i) + ": max side <= 1 px");
    }
    const std::size_t m = route_scale(max_side, cfg);
    const int stride = cfg.strides[m];
    GaussianRegion gauss;
    try {
      gauss = region_from_obb(obb, stride, cfg.t_iou);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidAnnotation, "annotation " + std::to_string(i) + ": " + e.what());
    }
    regions.push_back({obb, gauss, m, false});

    auto offer = [&](std::size_t scale_index, int x, int y, double f) {
      ScaleScratch& s = scratch[scale_index];
      const std::size_t c = static_cast<std::size_t>(y) * out.scales[scale_index].width() + x;
      if (f > s.best[c]) {
        s.best[c] = f;
        s.owner[c] = idx;
      }
    };

    const Hbb box = circumscribed_hbb(obb);
    const CellWindow win = cell_window(box, stride, out.scales[m].width());
    bool any = false;
    for (int y = win.y0; y <= win.y1; ++y) {
      for (int x = win.x0; x <= win.x1; ++x) {
        const double f = gaussian_value(gauss, {x + 0.5, y + 0.5});
        if (f >= gauss.thr) {
          any = true;
          offer(m, x, y, f);
        }
      }
    }
    if (any) continue;

    // No cell center inside the shrunk ellipse: take the densest cell whose
    // center lies strictly inside the box, descending to finer strides when
    // the routed one has none.
    regions.back().fallback = true;
    for (std::size_t mm = m + 1; mm-- > 0;) {
      const int st = cfg.strides[mm];
      const GaussianRegion g = mm == m ? gauss : region_from_obb(obb, st, cfg.t_iou);
      const CellWindow wm = cell_window(box, st, out.scales[mm].width());
      double best = -1.0;
      Cell pick{-1, -1};
      for (int y = wm.y0; y <= wm.y1; ++y) {
        for (int x = wm.x0; x <= wm.x1; ++x) {
          if (!strictly_inside(box, cell_center({x, y}, st))) continue;
          const double f = gaussian_value(g, {x + 0.5, y + 0.5});
          if (f > best) {
            best = f;
            pick = {x, y};
          }
        }
      }
      if (pick.x < 0) continue;
      regions.back().scale = mm;
      regions.back().gauss = g;
      offer(mm, pick.x, pick.y, best);
      break;
    }
  }

  std::vector<long long> counts(regions.size(), 0);
  for (std::size_t m = 0; m < out.scales.size(); ++m) {
    LabelScale& scale = out.scales[m];
    ScaleScratch& s = scratch[m];
    const int w = scale.width();
    for (std::size_t c = 0; c < s.owner.size(); ++c) {
      const int owner = s.owner[c];
      if (owner < 0) continue;
      const Cell cell{static_cast<int>(c % w), static_cast<int>(c / w)};
      ObbCode code;
      try {
        code = encode_at(regions[owner].obb, cell, scale.stride);
      } catch (const Error&) {
        s.owner[c] = -1;  // center falls outside the box; leave as background
        continue;
      }
      ++counts[owner];
      const auto values = code.to_array();
      auto obb_cell = scale.obb.cell(c);
      for (std::size_t k = 0; k < kObbChannels; ++k) obb_cell[k] = f32(values[k]);
    }
  }

  for (std::size_t m = 0; m < out.scales.size(); ++m) {
    LabelScale& scale = out.scales[m];
    const ScaleScratch& s = scratch[m];
    for (std::size_t c = 0; c < s.owner.size(); ++c) {
      const int owner = s.owner[c];
      if (owner < 0) continue;
      const RegionInfo& r = regions[owner];
      double weight = 1.0;
      if (!r.fallback) {
        weight = std::max((s.best[c] - r.gauss.thr) / (1.0 - r.gauss.thr), kMinPositiveWeight);
      }
      scale.heat.data()[c] = f32(weight);
      scale.obj.data()[c] = 1.0;
      scale.cls.cell(c)[annotations[owner].class_id] = 1.0;
      scale.region_id.data()[c] = owner;
      scale.xi.data()[c] = f32(area_normalization(static_cast<double>(counts[owner])));
    }
  }

  if (diagnostics != nullptr) {
    diagnostics->empty_regions.clear();
    diagnostics->fallback_regions.clear();
    for (std::size_t i = 0; i < regions.size(); ++i) {
      if (counts[i] == 0) diagnostics->empty_regions.push_back(static_cast<int>(i));
      if (regions[i].fallback) diagnostics->fallback_regions.push_back(static_cast<int>(i));
    }
  }
  return out;
}

AssignmentStats assignment_stats(const LabelTensorSet& labels, std::span<const ObbAnnotation> annotations) {
  AssignmentStats st;
  st.per_object_positives.assign(annotations.size(), 0);
  for (const auto& scale : labels.scales) {
    ScaleBalance b;
    b.stride = scale.stride;
    const auto& ids = scale.region_id.data();
    const auto& heat = scale.heat.data();
    for (std::size_t c = 0; c < ids.size(); ++c) {
      if (scale.obj.data()[c] <= 0.0) {
        ++b.negatives;
        continue;
      }
      ++b.positives;
      const auto id = static_cast<long long>(ids[c]);
      if (id >= 0 && static_cast<std::size_t>(id) < st.per_object_positives.size()) {
        ++st.per_object_positives[static_cast<std::size_t>(id)];
      }
      const int bin = std::clamp(static_cast<int>(std::ceil(heat[c] * 10.0)) - 1, 0, 9);
      ++st.heat_histogram[static_cast<std::size_t>(bin)];
    }
    b.ratio = b.negatives > 0 ? static_cast<double>(b.positives) / static_cast<double>(b.negatives) : 0.0;
    st.per_scale.push_back(b);
  }
  st.mismatch = static_cast<int>(
      std::count(st.per_object_positives.begin(), st.per_object_positives.end(), 0LL));
  return st;
}

}  // namespace gghl
