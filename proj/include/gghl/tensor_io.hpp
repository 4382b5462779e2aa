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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gghl/decoder.hpp"
#include "gghl/tensors.hpp"

namespace gghl {

/// Class names in file order; a name's index is its line number (0-based).
class ClassList {
 public:
  ClassList() = default;
  explicit ClassList(std::vector<std::string> names);

  int size() const noexcept { return static_cast<int>(names_.size()); }
  const std::string& name(int index) const { return names_.at(static_cast<std::size_t>(index)); }
  /// Throws Error(kUnknownClass).
  int index(std::string_view name) const;
  bool contains(std::string_view name) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> lookup_;
};

ClassList read_class_list(const std::filesystem::path& path);

// DOTA annotation text: "x1 y1 x2 y2 x3 y3 x4 y4 class difficult" per line.
// Blank lines and the "imagesource:" / "gsd:" header lines are skipped.
// Throws Error(kParseError) or Error(kUnknownClass), naming the line.
std::vector<ObbAnnotation> parse_dota(std::istream& in, const ClassList& classes, std::string_view source = "<stream>");
std::vector<ObbAnnotation> parse_dota(const std::filesystem::path& path, const ClassList& classes);
void write_dota(std::ostream& out, std::span<const ObbAnnotation> annotations, const ClassList& classes);

// Detection text: "x1 y1 x2 y2 x3 y3 x4 y4 class score" per line.
void write_detections(std::ostream& out, std::span<const Detection> dets, const ClassList& classes);
std::vector<Detection> parse_detections(std::istream& in, const ClassList& classes,
                                        std::string_view source = "<stream>");
std::vector<Detection> parse_detections(const std::filesystem::path& path, const ClassList& classes);

// GGHLTENS binary tensor file, all integers and floats little-endian:
//   "GGHLTENS" | u16 version | u8 scale count
//   per scale: u16 stride | u32 height | u32 width | u32 channels
//              | height*width*channels f32, row-major, channels-last
inline constexpr std::uint16_t kTensorFormatVersion = 1;
inline constexpr std::string_view kTensorMagic = "GGHLTENS";

struct TensorBlock {
  std::uint16_t stride = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 0;
  std::vector<float> values;
  friend bool operator==(const TensorBlock&, const TensorBlock&) = default;
};

struct TensorFile {
  std::vector<TensorBlock> blocks;
  friend bool operator==(const TensorFile&, const TensorFile&) = default;
};

std::vector<std::uint8_t> encode_tensor_file(const TensorFile& file);
/// Throws Error(kBadMagic), Error(kVersionMismatch) or Error(kTruncatedPayload).
TensorFile decode_tensor_file(std::span<const std::uint8_t> bytes);

// Label channel layout: F, obj, l1..l4, s1..s4, ar, cls[num_classes], region_id, xi.
inline constexpr int kLabelExtraChannels = 13;
// Prediction channel layout: obj_hat, obb_hat[9], cls_hat_raw[num_classes].
inline constexpr int kPredictionExtraChannels = 10;

TensorFile to_tensor_file(const LabelTensorSet& labels);
TensorFile to_tensor_file(const PredictionTensorSet& preds);
LabelTensorSet labels_from_tensor_file(const TensorFile& file);
PredictionTensorSet predictions_from_tensor_file(const TensorFile& file);

void write_tensorset(const std::filesystem::path& path, const LabelTensorSet& labels);
void write_tensorset(const std::filesystem::path& path, const PredictionTensorSet& preds);
LabelTensorSet read_label_tensorset(const std::filesystem::path& path);
PredictionTensorSet read_prediction_tensorset(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// 8-bit grayscale PNG of F on one scale (value round(255 * F)).
/// Throws Error(kIoError) or Error(kInvalidArgument) for a bad scale index.
void render_heatmap_png(const LabelTensorSet& labels, std::size_t scale, const std::filesystem::path& path);

}  // namespace gghl
