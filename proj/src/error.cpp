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

#include "gghl/error.hpp"

namespace gghl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateBox: return "DegenerateBox";
    case ErrorCode::kNonConvex: return "NonConvex";
    case ErrorCode::kInvalidDistances: return "InvalidDistances";
    case ErrorCode::kSideOutOfRange: return "SideOutOfRange";
    case ErrorCode::kInvalidAnnotation: return "InvalidAnnotation";
    case ErrorCode::kCellOutsideBox: return "CellOutsideBox";
    case ErrorCode::kInvalidCode: return "InvalidCode";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownClass: return "UnknownClass";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace gghl
