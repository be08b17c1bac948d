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

#ifndef HOMODYNE_ERROR_H_
#define HOMODYNE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace homodyne {

enum class ErrorKind {
  kInvalidArgument,
  kInvalidState,
  kExcessiveTruncation,
  kInvalidEta,
  kIncompletePovm,
  kFitDiverged,
  kUnderdetermined,
  kInsufficientPoints,
  kGridMismatch,
  kUnphysical,
  kPhaseGridTooCoarse,
  kParseError,
  kMissingInput,
};

std::string_view error_kind_name(ErrorKind kind);

// Numerical failures map to CLI exit code 3, everything else to 2.
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace homodyne

#endif  // HOMODYNE_ERROR_H_
