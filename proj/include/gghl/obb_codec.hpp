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
#include <span>
#include <vector>

#include "gghl/geometry.hpp"

namespace gghl {

inline constexpr std::size_t kObbChannels = 9;

/// Grid cell index; the cell's center sits at ((x + 0.5) * stride, (y + 0.5) * stride).
struct Cell {
  int x = 0;
  int y = 0;
};

Point2 cell_center(Cell cell, int stride);

/// Per-cell box encoding.
///
///   l  - distances from the cell center to the top, right, bottom and left
///        edges of the circumscribed HBB, in grid units (pixels / stride).
///   s  - gliding ratios: s[0] top edge from the top-left corner (fraction of
///        the width), s[1] right edge from the top-right corner (fraction of
///        the height), s[2] bottom edge from the bottom-right corner, s[3]
///        left edge from the bottom-left corner.
///   ar - area(OBB) / area(HBB).
struct ObbCode {
  EdgeDistances l{};
  std::array<double, 4> s{};
  double ar = 1.0;

  std::array<double, kObbChannels> to_array() const;
  static ObbCode from_array(std::span<const double, kObbChannels> v);
};

struct CodecOptions {
  // Emit the HBB corners when ar >= this value. Values above 1 disable the
  // fallback, which keeps decode an exact inverse of encode.
  double hbb_fallback_ar = 2.0;
};

/// Throws Error(kCellOutsideBox) unless the cell center lies strictly inside
/// the box's circumscribed HBB.
ObbCode encode_at(const Obb& obb, Cell cell, int stride);

/// Throws Error(kInvalidCode) for non-finite or out-of-range components.
Obb decode_at(const ObbCode& code, Cell cell, int stride, const CodecOptions& options = {});

std::vector<double> one_hot(int class_id, int num_classes);

}  // namespace gghl
