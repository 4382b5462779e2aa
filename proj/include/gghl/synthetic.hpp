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

// Seeded generators for synthetic scenes and tensor sets. Used by the CLI
// (gradcheck, bench) and by the test suites.

#include <cstdint>
#include <random>
#include <vector>

#include "gghl/tensors.hpp"

namespace gghl {

// mt19937_64 with hand-rolled uniform mapping so that sequences do not depend
// on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Rectangle vertices centred at c with sides w, h rotated by theta.
std::array<Point2, 4> rotated_rect(Point2 c, double w, double h, double theta);

// `count` rotated rectangles lying inside [0, img_size]^2. With `disjoint`,
// circumscribed boxes do not overlap (count must fit, or this loops).
std::vector<ObbAnnotation> random_scene(Rng& rng, int img_size, int count, int num_classes,
                                        double min_side = 12.0, double max_side = 300.0, bool disjoint = false);

// Random labels with a handful of positive cells per scale carrying valid
// codes, one-hot classes and xi in (0, 1].
LabelTensorSet random_label_set(Rng& rng, int num_scales, int size, int num_classes);

// Predictions with objectness and class scores in [lo, 1 - lo] and codes
// scattered around the labels.
PredictionTensorSet random_predictions(Rng& rng, const LabelTensorSet& labels, double lo = 0.02);

// Predictions equal to the labels: objectness 1 at positives (0 elsewhere),
// exact codes and one-hot class scores.
PredictionTensorSet perfect_predictions(const LabelTensorSet& labels);

}  // namespace gghl
