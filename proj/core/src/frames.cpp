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

#include "dforge/frames.hpp"

#include <cmath>

#include "dforge/error.hpp"

namespace dforge {

FrameActivity ToFrames(const Annotation& annotation, double frame_shift,
                       Eigen::Index num_frames) {
  if (!(frame_shift > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "frame_shift must be positive");
  }
  FrameActivity out;
  out.frame_shift = frame_shift;
  out.speakers = annotation.Speakers();
  out.active = ActivityMatrix::Zero(static_cast<Eigen::Index>(out.speakers.size()),
                                    num_frames);
  for (Eigen::Index s = 0; s < out.active.rows(); ++s) {
    const auto& track = annotation.SpeakerTimeline(out.speakers[s]);
    for (const Interval& iv : track.intervals()) {
      // Smallest t with centre >= start, largest with centre < end; the
      // epsilon snaps centres sitting exactly on a boundary.
      const double first = std::ceil((iv.start - kTimeEpsilon) / frame_shift - 0.5);
      const double last = std::ceil((iv.end - kTimeEpsilon) / frame_shift - 0.5) - 1;
      const Eigen::Index lo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(first));
      const Eigen::Index hi = std::min<Eigen::Index>(num_frames - 1,
                                                     static_cast<Eigen::Index>(last));
      for (Eigen::Index t = lo; t <= hi; ++t) out.active(s, t) = true;
    }
  }
  return out;
}

Annotation FromFrames(const FrameActivity& frames, std::string recording_id) {
  std::map<std::string, Timeline> tracks;
  const double shift = frames.frame_shift;
  for (Eigen::Index s = 0; s < frames.active.rows(); ++s) {
    std::vector<Interval> runs;
    Eigen::Index t = 0;
    const Eigen::Index n = frames.active.cols();
    while (t < n) {
      if (!frames.active(s, t)) {
        ++t;
        continue;
      }
      Eigen::Index u = t;
      while (u < n && frames.active(s, u)) ++u;
      runs.push_back({static_cast<double>(t) * shift, static_cast<double>(u) * shift});
      t = u;
    }
    if (!runs.empty()) tracks.emplace(frames.speakers[s], Timeline(std::move(runs)));
  }
  return Annotation::FromTracks(std::move(recording_id), std::move(tracks));
}

Eigen::Index FramesToCover(double end, double frame_shift) {
  if (end <= 0.0) return 0;
  return static_cast<Eigen::Index>(std::ceil(end / frame_shift - kTimeEpsilon));
}

}  // namespace dforge
