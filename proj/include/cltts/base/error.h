// include/cltts/base/error.h

// Copyright 2026  The cltts Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace cltts {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kFormat,
  // text frontend
  kMalformedSyllable,
  kUnmappedUnit,
  kUnknownPhoneme,
  kBadStressDigit,
  kEmptyInput,
  // embeddings
  kZeroVector,
  kDegenerateSet,
  kNumericalFailure,
  kDimensionMismatch,
  kOneClassOnly,
  // dsp
  kOutOfRange,
  kTooShort,
  kMismatchedFilterbank,
  kEmptyAudio,
  // models
  kIdOutOfRange,
  kShapeMismatch,
  kStaleTape,
  kLengthMismatch,
  // evaluation
  kBadScore,
  kUnknownAxis,
  kEmptyGroup,
  kInsufficientPool,
  kStage,
};

const char *ErrorCodeName(ErrorCode code);

/// All library failures are reported as Error; code() identifies the
/// contract violation so callers and tests can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cltts
