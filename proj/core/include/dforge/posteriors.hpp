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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace dforge {

// Per-frame activity probabilities, speakers x frames.
struct PosteriorMatrix {
  std::string recording_id;
  double frame_shift = 0.01;
  std::vector<std::string> speaker_ids;
  Eigen::MatrixXd values;

  Eigen::Index num_speakers() const { return values.rows(); }
  Eigen::Index num_frames() const { return values.cols(); }
  // Values in [0, 1], one id per row, positive frame shift.
  void Validate() const;
};

struct BinaryStream {
  std::string recording_id;
  double frame_shift = 0.01;
  std::vector<std::uint8_t> values;

  std::size_t size() const { return values.size(); }
  std::size_t CountActive() const;
};

// POST files: header "POST <rec> <S> <T> <frame_shift_s>" followed by S text
// lines of T values, or S*T little-endian float32 values. Speaker ids are
// not stored; rows are named "<prefix><row>".
PosteriorMatrix ParsePosteriors(std::string_view data,
                                const std::string& speaker_prefix = "spk");
std::string WritePosteriorsText(const PosteriorMatrix& posteriors);
std::string WritePosteriorsBinary(const PosteriorMatrix& posteriors);

}  // namespace dforge
