// Copyright 2026 The advscc Authors.
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace advscc {

enum class ErrorCode {
  kInvalidArgument,
  kEmpty,
  kNegativeMass,
  kSumNotOne,
  kDimensionMismatch,
  kOffSimplex,
  kIndexOutOfRange,
  kNumericalBreakdown,
  kNotBracketed,
  kAdversaryInfeasible,
  kTooLarge,
  kNoFeasiblePoint,
  kEmptySample,
  kEmptyCells,
  kDegenerate,
  kMuOutOfRange,
  kNonFinite,
  kInternal,
  kParse,
  kUnsupportedVersion,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmpty: return "Empty";
    case ErrorCode::kNegativeMass: return "NegativeMass";
    case ErrorCode::kSumNotOne: return "SumNotOne";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kOffSimplex: return "OffSimplex";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kNumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::kNotBracketed: return "NotBracketed";
    case ErrorCode::kAdversaryInfeasible: return "AdversaryInfeasible";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kNoFeasiblePoint: return "NoFeasiblePoint";
    case ErrorCode::kEmptySample: return "EmptySample";
    case ErrorCode::kEmptyCells: return "EmptyCells";
    case ErrorCode::kDegenerate: return "Degenerate";
    case ErrorCode::kMuOutOfRange: return "MuOutOfRange";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kInternal: return "Internal";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above so the
// CLI can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace detail
}  // namespace advscc
