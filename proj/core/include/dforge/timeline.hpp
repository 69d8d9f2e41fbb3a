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

#include <map>
#include <span>
#include <string>
#include <vector>

namespace dforge {

// All time comparisons are made with this tolerance (seconds).
inline constexpr double kTimeEpsilon = 1e-6;

struct Interval {
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
  bool Contains(double t) const { return t >= start && t < end; }
  bool operator==(const Interval&) const = default;
};

// A sorted set of disjoint half-open intervals. Overlapping or touching
// inputs (within kTimeEpsilon) are merged and empty ones dropped.
class Timeline {
 public:
  Timeline() = default;
  explicit Timeline(std::vector<Interval> intervals);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  std::size_t size() const { return intervals_.size(); }

  double Duration() const;
  bool Contains(double t) const;
  // Distance from t to the closest point of the timeline; 0 inside.
  double DistanceTo(double t) const;

  Timeline Union(const Timeline& other) const;
  Timeline Intersect(const Timeline& other) const;
  Timeline Subtract(const Timeline& other) const;
  Timeline Clip(Interval extent) const;

  // Boundaries compare within kTimeEpsilon.
  bool operator==(const Timeline& other) const;

 private:
  std::vector<Interval> intervals_;
};

struct Turn {
  std::string recording_id;
  std::string speaker;
  double onset = 0.0;
  double duration = 0.0;

  double offset() const { return onset + duration; }
  bool operator==(const Turn&) const = default;
};

// Speaker turns of one recording. Same-speaker turns that overlap or touch
// are merged on construction; turns are kept sorted by (onset, speaker).
class Annotation {
 public:
  Annotation() = default;
  explicit Annotation(std::string recording_id, std::vector<Turn> turns = {});

  static Annotation FromTracks(std::string recording_id,
                               std::map<std::string, Timeline> tracks);

  const std::string& recording_id() const { return recording_id_; }
  const std::vector<Turn>& turns() const { return turns_; }
  const std::map<std::string, Timeline>& tracks() const { return tracks_; }
  bool empty() const { return turns_.empty(); }

  // Speaker labels in lexicographic order.
  std::vector<std::string> Speakers() const;
  std::size_t NumSpeakers() const { return tracks_.size(); }
  const Timeline& SpeakerTimeline(const std::string& speaker) const;
  // Time covered by at least one speaker.
  Timeline Support() const;
  // Time covered by at least two speakers.
  Timeline OverlapSupport() const;
  // Sum of per-speaker durations (speaker-seconds).
  double TotalSpeech() const;
  double End() const;

  Annotation WithRecordingId(std::string recording_id) const;
  Annotation Relabeled(const std::map<std::string, std::string>& mapping) const;

  bool operator==(const Annotation& other) const {
    return recording_id_ == other.recording_id_ && tracks_ == other.tracks_;
  }

 private:
  void RebuildTurns();

  std::string recording_id_;
  std::map<std::string, Timeline> tracks_;
  std::vector<Turn> turns_;
};

// Scoring regions per recording id.
using Uem = std::map<std::string, Timeline>;

// Intersects every turn with the recording's UEM; identity when the
// recording is not listed.
Annotation Crop(const Annotation& annotation, const Uem& uem);
Annotation Crop(const Annotation& annotation, const Timeline& keep);

struct ScoringRegion {
  double start = 0.0;
  double end = 0.0;
  std::vector<std::string> active_ref;
  std::vector<std::string> active_hyp;

  double duration() const { return end - start; }
};

// Splits `extent` at every turn boundary of both annotations. Regions tile
// the extent and list the speakers active on each side.
std::vector<ScoringRegion> Regionize(const Annotation& ref,
                                     const Annotation& hyp, Interval extent);

// Same as Regionize for any number of annotations. Active speakers are
// reported as indices into each annotation's Speakers() list.
struct MultiRegion {
  double start = 0.0;
  double end = 0.0;
  std::vector<std::vector<int>> active;

  double duration() const { return end - start; }
};

std::vector<MultiRegion> RegionizeMany(
    std::span<const Annotation* const> annotations, Interval extent);

// [0, latest offset] over the given annotations.
Interval CommonExtent(std::span<const Annotation* const> annotations);

}  // namespace dforge
