// Copyright 2026 The Homodyne Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "homodyne/error.h"

namespace homodyne {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kInvalidState: return "InvalidState";
    case ErrorKind::kExcessiveTruncation: return "ExcessiveTruncation";
    case ErrorKind::kInvalidEta: return "InvalidEta";
    case ErrorKind::kIncompletePovm: return "IncompletePovm";
    case ErrorKind::kFitDiverged: return "FitDiverged";
    case ErrorKind::kUnderdetermined: return "Underdetermined";
    case ErrorKind::kInsufficientPoints: return "InsufficientPoints";
    case ErrorKind::kGridMismatch: return "GridMismatch";
    case ErrorKind::kUnphysical: return "Unphysical";
    case ErrorKind::kPhaseGridTooCoarse: return "PhaseGridTooCoarse";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kMissingInput: return "MissingInput";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kExcessiveTruncation:
    case ErrorKind::kIncompletePovm:
    case ErrorKind::kFitDiverged:
    case ErrorKind::kUnderdetermined:
    case ErrorKind::kUnphysical:
      return true;
    default:
      return false;
  }
}

}  // namespace homodyne
