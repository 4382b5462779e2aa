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
#include <string>
#include <vector>

#include "gghl/geometry.hpp"

namespace gghl {

/// One ground-truth box as read from an annotation file.
struct ObbAnnotation {
  std::array<Point2, 4> vertices{};
  int class_id = 0;
  bool difficult = false;
};

/// Dense height x width x channels array, row-major and channels-last.
class Grid {
 public:
  Grid() = default;
  Grid(int height, int width, int channels)
      : height_(height), width_(width), channels_(channels),
        data_(static_cast<std::size_t>(height) * width * channels, 0.0) {}

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t cells() const noexcept { return static_cast<std::size_t>(height_) * width_; }

  std::size_t index(int y, int x, int c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  double& at(int y, int x, int c = 0) noexcept { return data_[index(y, x, c)]; }
  double at(int y, int x, int c = 0) const noexcept { return data_[index(y, x, c)]; }

  std::span<double> cell(std::size_t flat) noexcept {
    return {data_.data() + flat * channels_, static_cast<std::size_t>(channels_)};
  }
  std::span<const double> cell(std::size_t flat) const noexcept {
    return {data_.data() + flat * channels_, static_cast<std::size_t>(channels_)};
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool same_shape(const Grid& o) const noexcept {
    return height_ == o.height_ && width_ == o.width_ && channels_ == o.channels_;
  }
  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

inline constexpr double kBackgroundRegion = -1.0;

/// Ground truth for one feature-map scale.
struct LabelScale {
  int stride = 8;
  int num_classes = 1;
  Grid heat;       // F, Gaussian weight in [0,1]
  Grid obj;        // 1 at positives
  Grid obb;        // 9 channels: l1..l4, s1..s4, ar
  Grid cls;        // one-hot, num_classes channels
  Grid region_id;  // annotation index, kBackgroundRegion at negatives
  Grid xi;         // area normalization, 1 at negatives

  LabelScale() = default;
  LabelScale(int stride, int height, int width, int num_classes);

  int height() const noexcept { return heat.height(); }
  int width() const noexcept { return heat.width(); }
  friend bool operator==(const LabelScale&, const LabelScale&) = default;
};

struct LabelTensorSet {
  std::vector<LabelScale> scales;
  friend bool operator==(const LabelTensorSet&, const LabelTensorSet&) = default;
};

/// Network outputs for one scale (or gradients with the same layout).
struct PredictionScale {
  int stride = 8;
  int num_classes = 1;
  Grid obj_hat;      // (0,1)
  Grid obb_hat;      // 9 channels
  Grid cls_hat_raw;  // (0,1), num_classes channels

  PredictionScale() = default;
  PredictionScale(int stride, int height, int width, int num_classes);

  int height() const noexcept { return obj_hat.height(); }
  int width() const noexcept { return obj_hat.width(); }
  friend bool operator==(const PredictionScale&, const PredictionScale&) = default;
};

struct PredictionTensorSet {
  std::vector<PredictionScale> scales;
  friend bool operator==(const PredictionTensorSet&, const PredictionTensorSet&) = default;
};

/// Zero-filled predictions shaped like `labels`.
PredictionTensorSet zero_predictions_like(const LabelTensorSet& labels);

/// Throws Error(kShapeMismatch) unless scale count, strides and grid shapes agree.
void check_shapes(const LabelTensorSet& labels, const PredictionTensorSet& preds);

}  // namespace gghl
