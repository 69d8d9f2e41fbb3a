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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dforge {

enum class ErrorCode {
  kMalformedLine,
  kNonPositiveDuration,
  kEmptyReference,
  kDimensionMismatch,
  kSingularCovariance,
  kDegenerateClasses,
  kEmptyInit,
  kLengthMismatch,
  kEvenWindow,
  kMissingPosteriors,
  kNonPositiveWeight,
  kWeightCountMismatch,
  kSourceFailure,
  kMissingRecording,
  kFormatError,
  kInfeasibleOverlap,
  kGridMismatch,
  kConfigError,
  kFileNotFound,
  kInvalidArgument,
};

std::string_view ToString(ErrorCode code);

// Every failure raised by the library carries a machine-readable code so the
// CLI can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures that point at a line of an input file.
class LineError : public Error {
 public:
  LineError(ErrorCode code, std::size_t line_no, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dforge
