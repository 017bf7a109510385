// Copyright 2026 The tonelens Authors. All Rights Reserved.
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

#include "tonelens/error.hpp"

namespace tonelens {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kUnsupportedCodec: return "unsupported codec";
    case ErrorKind::kEmptyAudio: return "empty audio";
    case ErrorKind::kIo: return "io error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kPattern: return "pattern error";
    case ErrorKind::kParameter: return "parameter error";
    case ErrorKind::kTooShort: return "too short";
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kSingular: return "singular system";
    case ErrorKind::kInsufficientData: return "insufficient data";
    case ErrorKind::kUndefinedCorrelation: return "undefined correlation";
    case ErrorKind::kEmptyInput: return "empty input";
    case ErrorKind::kEmptyPairing: return "empty pairing";
    case ErrorKind::kSchema: return "schema error";
    case ErrorKind::kZeroSuccess: return "zero success";
  }
  return "error";
}

}  // namespace tonelens
