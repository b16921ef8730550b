// src/base/error.cc

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

#include "cltts/base/error.h"

namespace cltts {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kIo:
      return "Io";
    case ErrorCode::kFormat:
      return "Format";
    case ErrorCode::kMalformedSyllable:
      return "MalformedSyllable";
    case ErrorCode::kUnmappedUnit:
      return "UnmappedUnit";
    case ErrorCode::kUnknownPhoneme:
      return "UnknownPhoneme";
    case ErrorCode::kBadStressDigit:
      return "BadStressDigit";
    case ErrorCode::kEmptyInput:
      return "EmptyInput";
    case ErrorCode::kZeroVector:
      return "ZeroVector";
    case ErrorCode::kDegenerateSet:
      return "DegenerateSet";
    case ErrorCode::kNumericalFailure:
      return "NumericalFailure";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kOneClassOnly:
      return "OneClassOnly";
    case ErrorCode::kOutOfRange:
      return "OutOfRange";
    case ErrorCode::kTooShort:
      return "TooShort";
    case ErrorCode::kMismatchedFilterbank:
      return "MismatchedFilterbank";
    case ErrorCode::kEmptyAudio:
      return "EmptyAudio";
    case ErrorCode::kIdOutOfRange:
      return "IdOutOfRange";
    case ErrorCode::kShapeMismatch:
      return "ShapeMismatch";
    case ErrorCode::kStaleTape:
      return "StaleTape";
    case ErrorCode::kLengthMismatch:
      return "LengthMismatch";
    case ErrorCode::kBadScore:
      return "BadScore";
    case ErrorCode::kUnknownAxis:
      return "UnknownAxis";
    case ErrorCode::kEmptyGroup:
      return "EmptyGroup";
    case ErrorCode::kInsufficientPool:
      return "InsufficientPool";
    case ErrorCode::kStage:
      return "Stage";
  }
  return "Unknown";
}

}  // namespace cltts
