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

#include <string>
#include <vector>

#include <Eigen/Core>

#include "dforge/timeline.hpp"

namespace dforge {

using ActivityMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Speakers x frames binary activity on a uniform grid.
struct FrameActivity {
  std::vector<std::string> speakers;
  double frame_shift = 0.01;
  ActivityMatrix active;

  Eigen::Index num_frames() const { return active.cols(); }
};

// Frame t of speaker s is active iff the frame centre (t + 0.5) * shift lies
// inside one of s's turns. Rows follow annotation.Speakers().
FrameActivity ToFrames(const Annotation& annotation, double frame_shift,
                       Eigen::Index num_frames);

// Runs of active frames become turns [t * shift, (t + n) * shift).
Annotation FromFrames(const FrameActivity& frames, std::string recording_id);

// Number of frames needed to cover [0, end).
Eigen::Index FramesToCover(double end, double frame_shift);

}  // namespace dforge
