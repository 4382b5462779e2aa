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

#include "gghl/tensor_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <memory>
#include <ostream>
#include <sstream>

#include "gghl/error.hpp"
#include "gghl/obb_codec.hpp"

namespace gghl {

namespace {

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t j = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > j) out.push_back(s.substr(j, i - j));
  }
  return out;
}

bool parse_double(std::string_view tok, double& out) {
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size() && std::isfinite(out);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool is_header_line(std::string_view line) {
  return line.starts_with("imagesource:") || line.starts_with("gsd:");
}

std::array<Point2, 4> parse_vertices(const std::vector<std::string_view>& tok, std::string_view source,
                                     std::size_t line) {
  std::array<Point2, 4> v{};
  for (std::size_t k = 0; k < 4; ++k) {
    if (!parse_double(tok[2 * k], v[k].x) || !parse_double(tok[2 * k + 1], v[k].y)) {
      throw Error(ErrorCode::kParseError, where(source, line) + ": bad coordinate");
    }
  }
  return v;
}

// Little-endian primitive writers/readers.
template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 2, std::uint16_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (bytes_.size() - pos_ < sizeof(T)) throw Error(ErrorCode::kTruncatedPayload, "unexpected end of file");
    using U = std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(static_cast<U>(bytes_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (remaining() < n) throw Error(ErrorCode::kTruncatedPayload, "unexpected end of file");
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

TensorBlock make_block(int stride, int height, int width, int channels) {
  TensorBlock b;
  b.stride = static_cast<std::uint16_t>(stride);
  b.height = static_cast<std::uint32_t>(height);
  b.width = static_cast<std::uint32_t>(width);
  b.channels = static_cast<std::uint32_t>(channels);
  b.values.reserve(static_cast<std::size_t>(height) * width * channels);
  return b;
}

void append_cell(std::vector<float>& dst, std::span<const double> src) {
  for (double v : src) dst.push_back(static_cast<float>(v));
}

void read_cell(std::span<const float> src, std::span<double> dst) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<double>(src[i]);
}

}  // namespace

ClassList::ClassList(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!lookup_.emplace(names_[i], static_cast<int>(i)).second) {
      throw Error(ErrorCode::kParseError, "duplicate class name '" + names_[i] + "'");
    }
  }
}

int ClassList::index(std::string_view name) const {
  const auto it = lookup_.find(std::string(name));
  if (it == lookup_.end()) throw Error(ErrorCode::kUnknownClass, "'" + std::string(name) + "'");
  return it->second;
}

bool ClassList::contains(std::string_view name) const { return lookup_.count(std::string(name)) > 0; }

ClassList read_class_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open class list " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    names.push_back(line);
  }
  while (!names.empty() && names.back().empty()) names.pop_back();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) throw Error(ErrorCode::kParseError, where(path.string(), i + 1) + ": empty class name");
  }
  return ClassList(std::move(names));
}

std::vector<ObbAnnotation> parse_dota(std::istream& in, const ClassList& classes, std::string_view source) {
  std::vector<ObbAnnotation> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_header_line(line)) continue;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 10) {
      throw Error(ErrorCode::kParseError,
                  where(source, lineno) + ": expected 10 fields, found " + std::to_string(tok.size()));
    }
    ObbAnnotation a;
    a.vertices = parse_vertices(tok, source, lineno);
    if (!classes.contains(tok[8])) {
      throw Error(ErrorCode::kUnknownClass, where(source, lineno) + ": '" + std::string(tok[8]) + "'");
    }
    a.class_id = classes.index(tok[8]);
    if (tok[9] == "0") {
      a.difficult = false;
    } else if (tok[9] == "1") {
      a.difficult = true;
    } else {
      throw Error(ErrorCode::kParseError, where(source, lineno) + ": difficulty must be 0 or 1");
    }
    out.push_back(a);
  }
  return out;
}

std::vector<ObbAnnotation> parse_dota(const std::filesystem::path& path, const ClassList& classes) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return parse_dota(in, classes, path.string());
}

void write_dota(std::ostream& out, std::span<const ObbAnnotation> annotations, const ClassList& classes) {
  for (const auto& a : annotations) {
    for (const auto& p : a.vertices) out << format_double(p.x) << ' ' << format_double(p.y) << ' ';
    out << classes.name(a.class_id) << ' ' << (a.difficult ? 1 : 0) << '\n';
  }
}

void write_detections(std::ostream& out, std::span<const Detection> dets, const ClassList& classes) {
  for (const auto& d : dets) {
    for (const auto& p : d.obb.vertices()) out << format_double(p.x) << ' ' << format_double(p.y) << ' ';
    out << (d.class_id < classes.size() ? classes.name(d.class_id) : std::to_string(d.class_id)) << ' '
        << format_double(d.score) << '\n';
  }
}

std::vector<Detection> parse_detections(std::istream& in, const ClassList& classes, std::string_view source) {
  std::vector<Detection> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 10) {
      throw Error(ErrorCode::kParseError,
                  where(source, lineno) + ": expected 10 fields, found " + std::to_string(tok.size()));
    }
    Detection d;
    try {
      d.obb = canonicalize_obb(parse_vertices(tok, source, lineno));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParseError) throw;
      throw Error(ErrorCode::kParseError, where(source, lineno) + ": " + e.what());
    }
    if (!classes.contains(tok[8])) {
      throw Error(ErrorCode::kUnknownClass, where(source, lineno) + ": '" + std::string(tok[8]) + "'");
    }
    d.class_id = classes.index(tok[8]);
    if (!parse_double(tok[9], d.score)) throw Error(ErrorCode::kParseError, where(source, lineno) + ": bad score");
    out.push_back(d);
  }
  return out;
}

std::vector<Detection> parse_detections(const std::filesystem::path& path, const ClassList& classes) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return parse_detections(in, classes, path.string());
}

std::vector<std::uint8_t> encode_tensor_file(const TensorFile& file) {
  if (file.blocks.size() > 255) throw Error(ErrorCode::kInvalidArgument, "more than 255 scales");
  std::vector<std::uint8_t> out(kTensorMagic.begin(), kTensorMagic.end());
  put_le<std::uint16_t>(out, kTensorFormatVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(file.blocks.size()));
  for (const auto& b : file.blocks) {
    const std::size_t n = static_cast<std::size_t>(b.height) * b.width * b.channels;
    if (b.values.size() != n) throw Error(ErrorCode::kShapeMismatch, "block payload does not match its header");
    put_le<std::uint16_t>(out, b.stride);
    put_le<std::uint32_t>(out, b.height);
    put_le<std::uint32_t>(out, b.width);
    put_le<std::uint32_t>(out, b.channels);
    out.reserve(out.size() + 4 * n);
    for (float v : b.values) put_le<float>(out, v);
  }
  return out;
}

TensorFile decode_tensor_file(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kTensorMagic.size() ||
      std::memcmp(bytes.data(), kTensorMagic.data(), kTensorMagic.size()) != 0) {
    throw Error(ErrorCode::kBadMagic, "not a GGHLTENS file");
  }
  Reader r(bytes.subspan(kTensorMagic.size()));
  const auto version = r.get<std::uint16_t>();
  if (version != kTensorFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch, "version " + std::to_string(version));
  }
  const auto count = r.get<std::uint8_t>();
  TensorFile file;
  for (std::uint8_t s = 0; s < count; ++s) {
    TensorBlock b;
    b.stride = r.get<std::uint16_t>();
    b.height = r.get<std::uint32_t>();
    b.width = r.get<std::uint32_t>();
    b.channels = r.get<std::uint32_t>();
    const std::uint64_t n = static_cast<std::uint64_t>(b.height) * b.width * b.channels;
    if (n * 4 > r.remaining()) throw Error(ErrorCode::kTruncatedPayload, "scale " + std::to_string(s));
    b.values.resize(static_cast<std::size_t>(n));
    for (auto& v : b.values) v = r.get<float>();
    file.blocks.push_back(std::move(b));
  }
  if (r.remaining() != 0) throw Error(ErrorCode::kTruncatedPayload, "trailing bytes after the last scale");
  return file;
}

TensorFile to_tensor_file(const LabelTensorSet& labels) {
  TensorFile file;
  for (const auto& s : labels.scales) {
    TensorBlock b = make_block(s.stride, s.height(), s.width(), kLabelExtraChannels + s.num_classes);
    for (std::size_t c = 0; c < s.heat.cells(); ++c) {
      append_cell(b.values, s.heat.cell(c));
      append_cell(b.values, s.obj.cell(c));
      append_cell(b.values, s.obb.cell(c));
      append_cell(b.values, s.cls.cell(c));
      append_cell(b.values, s.region_id.cell(c));
      append_cell(b.values, s.xi.cell(c));
    }
    file.blocks.push_back(std::move(b));
  }
  return file;
}

TensorFile to_tensor_file(const PredictionTensorSet& preds) {
  TensorFile file;
  for (const auto& s : preds.scales) {
    TensorBlock b = make_block(s.stride, s.height(), s.width(), kPredictionExtraChannels + s.num_classes);
    for (std::size_t c = 0; c < s.obj_hat.cells(); ++c) {
      append_cell(b.values, s.obj_hat.cell(c));
      append_cell(b.values, s.obb_hat.cell(c));
      append_cell(b.values, s.cls_hat_raw.cell(c));
    }
    file.blocks.push_back(std::move(b));
  }
  return file;
}

LabelTensorSet labels_from_tensor_file(const TensorFile& file) {
  LabelTensorSet out;
  for (const auto& b : file.blocks) {
    const int num_classes = static_cast<int>(b.channels) - kLabelExtraChannels;
    if (num_classes < 1) throw Error(ErrorCode::kShapeMismatch, "too few channels for a label tensor");
    LabelScale s(b.stride, static_cast<int>(b.height), static_cast<int>(b.width), num_classes);
    std::span<const float> all(b.values);
    const std::size_t nc = b.channels;
    for (std::size_t c = 0; c < s.heat.cells(); ++c) {
      auto src = all.subspan(c * nc, nc);
      std::size_t off = 0;
      for (Grid* g : {&s.heat, &s.obj, &s.obb, &s.cls, &s.region_id, &s.xi}) {
        auto dst = g->cell(c);
        read_cell(src.subspan(off, dst.size()), dst);
        off += dst.size();
      }
    }
    out.scales.push_back(std::move(s));
  }
  return out;
}

PredictionTensorSet predictions_from_tensor_file(const TensorFile& file) {
  PredictionTensorSet out;
  for (const auto& b : file.blocks) {
    const int num_classes = static_cast<int>(b.channels) - kPredictionExtraChannels;
    if (num_classes < 1) throw Error(ErrorCode::kShapeMismatch, "too few channels for a prediction tensor");
    PredictionScale s(b.stride, static_cast<int>(b.height), static_cast<int>(b.width), num_classes);
    std::span<const float> all(b.values);
    const std::size_t nc = b.channels;
    for (std::size_t c = 0; c < s.obj_hat.cells(); ++c) {
      auto src = all.subspan(c * nc, nc);
      std::size_t off = 0;
      for (Grid* g : {&s.obj_hat, &s.obb_hat, &s.cls_hat_raw}) {
        auto dst = g->cell(c);
        read_cell(src.subspan(off, dst.size()), dst);
        off += dst.size();
      }
    }
    out.scales.push_back(std::move(s));
  }
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

void write_tensorset(const std::filesystem::path& path, const LabelTensorSet& labels) {
  write_file_bytes(path, encode_tensor_file(to_tensor_file(labels)));
}

void write_tensorset(const std::filesystem::path& path, const PredictionTensorSet& preds) {
  write_file_bytes(path, encode_tensor_file(to_tensor_file(preds)));
}

LabelTensorSet read_label_tensorset(const std::filesystem::path& path) {
  return labels_from_tensor_file(decode_tensor_file(read_file_bytes(path)));
}

PredictionTensorSet read_prediction_tensorset(const std::filesystem::path& path) {
  return predictions_from_tensor_file(decode_tensor_file(read_file_bytes(path)));
}

void render_heatmap_png(const LabelTensorSet& labels, std::size_t scale, const std::filesystem::path& path) {
  if (scale >= labels.scales.size()) throw Error(ErrorCode::kInvalidArgument, "scale index out of range");
  const LabelScale& s = labels.scales[scale];
  const int w = s.width();
  const int h = s.height();
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(s.heat.data()[i], 0.0, 1.0) * 255.0));
  }

  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::kIoError, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIoError, "PNG encoding failed for " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < h; ++y) png_write_row(png, pixels.data() + static_cast<std::size_t>(y) * w);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(fp.get()) != 0) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace gghl
