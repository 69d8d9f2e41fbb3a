// Copyright 2026 The diarize-forge Authors.
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

#include "dforge/error.hpp"

namespace dforge {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kNonPositiveDuration: return "NonPositiveDuration";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kDegenerateClasses: return "DegenerateClasses";
    case ErrorCode::kEmptyInit: return "EmptyInit";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEvenWindow: return "EvenWindow";
    case ErrorCode::kMissingPosteriors: return "MissingPosteriors";
    case ErrorCode::kNonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::kWeightCountMismatch: return "WeightCountMismatch";
    case ErrorCode::kSourceFailure: return "SourceFailure";
    case ErrorCode::kMissingRecording: return "MissingRecording";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kInfeasibleOverlap: return "InfeasibleOverlap";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ToString(code)) + ": " + message),
      code_(code) {}

LineError::LineError(ErrorCode code, std::size_t line_no,
                     const std::string& message)
    : Error(code, "line " + std::to_string(line_no) + ": " + message),
      line_(line_no) {}

}  // namespace dforge
