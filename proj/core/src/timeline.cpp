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

#include "dforge/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "dforge/error.hpp"

namespace dforge {

Timeline::Timeline(std::vector<Interval> intervals) {
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) {
              return a.start < b.start || (a.start == b.start && a.end < b.end);
            });
  for (const Interval& iv : intervals) {
    if (iv.end - iv.start <= kTimeEpsilon) continue;
    if (!intervals_.empty() && iv.start <= intervals_.back().end + kTimeEpsilon) {
      intervals_.back().end = std::max(intervals_.back().end, iv.end);
    } else {
      intervals_.push_back(iv);
    }
  }
}

bool Timeline::operator==(const Timeline& other) const {
  if (intervals_.size() != other.intervals_.size()) return false;
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (std::abs(intervals_[i].start - other.intervals_[i].start) > kTimeEpsilon ||
        std::abs(intervals_[i].end - other.intervals_[i].end) > kTimeEpsilon) {
      return false;
    }
  }
  return true;
}

double Timeline::Duration() const {
  double total = 0.0;
  for (const Interval& iv : intervals_) total += iv.duration();
  return total;
}

bool Timeline::Contains(double t) const {
  auto it = std::upper_bound(
      intervals_.begin(), intervals_.end(), t,
      [](double value, const Interval& iv) { return value < iv.start; });
  if (it == intervals_.begin()) return false;
  return std::prev(it)->Contains(t);
}

double Timeline::DistanceTo(double t) const {
  double best = std::numeric_limits<double>::infinity();
  auto it = std::upper_bound(
      intervals_.begin(), intervals_.end(), t,
      [](double value, const Interval& iv) { return value < iv.start; });
  if (it != intervals_.end()) best = it->start - t;
  if (it != intervals_.begin()) {
    const Interval& prev = *std::prev(it);
    best = std::min(best, prev.Contains(t) ? 0.0 : t - prev.end);
  }
  return std::max(best, 0.0);
}

Timeline Timeline::Union(const Timeline& other) const {
  std::vector<Interval> all = intervals_;
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return Timeline(std::move(all));
}

Timeline Timeline::Intersect(const Timeline& other) const {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  const auto& a = intervals_;
  const auto& b = other.intervals_;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].start, b[j].start);
    const double hi = std::min(a[i].end, b[j].end);
    if (hi - lo > kTimeEpsilon) out.push_back({lo, hi});
    if (a[i].end < b[j].end) {
      ++i;
    } else {
      ++j;
    }
  }
  return Timeline(std::move(out));
}

Timeline Timeline::Subtract(const Timeline& other) const {
  std::vector<Interval> out;
  const auto& b = other.intervals_;
  std::size_t j = 0;
  for (Interval cur : intervals_) {
    while (j < b.size() && b[j].end <= cur.start) ++j;
    std::size_t k = j;
    while (k < b.size() && b[k].start < cur.end) {
      if (b[k].start > cur.start) out.push_back({cur.start, b[k].start});
      cur.start = std::max(cur.start, b[k].end);
      if (cur.start >= cur.end) break;
      ++k;
    }
    if (cur.end > cur.start) out.push_back(cur);
  }
  return Timeline(std::move(out));
}

Timeline Timeline::Clip(Interval extent) const {
  return Intersect(Timeline({extent}));
}

namespace {

void ValidateTurn(const Turn& turn, const std::string& recording_id) {
  if (turn.speaker.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "turn with empty speaker label");
  }
  if (!turn.recording_id.empty() && turn.recording_id != recording_id) {
    throw Error(ErrorCode::kInvalidArgument,
                "turn of recording '" + turn.recording_id +
                    "' added to annotation of '" + recording_id + "'");
  }
  if (turn.onset < -kTimeEpsilon) {
    throw Error(ErrorCode::kInvalidArgument, "negative onset");
  }
  if (!(turn.duration > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDuration,
                "turn of '" + turn.speaker + "' has non-positive duration");
  }
}

}  // namespace

Annotation::Annotation(std::string recording_id, std::vector<Turn> turns)
    : recording_id_(std::move(recording_id)) {
  std::map<std::string, std::vector<Interval>> grouped;
  for (const Turn& turn : turns) {
    ValidateTurn(turn, recording_id_);
    grouped[turn.speaker].push_back(
        {std::max(turn.onset, 0.0), turn.offset()});
  }
  for (auto& [speaker, intervals] : grouped) {
    Timeline track(std::move(intervals));
    if (!track.empty()) tracks_.emplace(speaker, std::move(track));
  }
  RebuildTurns();
}

Annotation Annotation::FromTracks(std::string recording_id,
                                  std::map<std::string, Timeline> tracks) {
  Annotation out;
  out.recording_id_ = std::move(recording_id);
  for (auto& [speaker, track] : tracks) {
    if (speaker.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty speaker label");
    }
    if (track.empty()) continue;
    if (track.intervals().front().start < -kTimeEpsilon) {
      throw Error(ErrorCode::kInvalidArgument, "negative onset");
    }
    out.tracks_.emplace(speaker, std::move(track));
  }
  out.RebuildTurns();
  return out;
}

void Annotation::RebuildTurns() {
  turns_.clear();
  for (const auto& [speaker, track] : tracks_) {
    for (const Interval& iv : track.intervals()) {
      turns_.push_back({recording_id_, speaker, iv.start, iv.duration()});
    }
  }
  std::sort(turns_.begin(), turns_.end(), [](const Turn& a, const Turn& b) {
    if (a.onset != b.onset) return a.onset < b.onset;
    return a.speaker < b.speaker;
  });
}

std::vector<std::string> Annotation::Speakers() const {
  std::vector<std::string> out;
  out.reserve(tracks_.size());
  for (const auto& entry : tracks_) out.push_back(entry.first);
  return out;
}

const Timeline& Annotation::SpeakerTimeline(const std::string& speaker) const {
  static const Timeline kEmpty;
  auto it = tracks_.find(speaker);
  return it == tracks_.end() ? kEmpty : it->second;
}

Timeline Annotation::Support() const {
  std::vector<Interval> all;
  for (const auto& [speaker, track] : tracks_) {
    all.insert(all.end(), track.intervals().begin(), track.intervals().end());
  }
  return Timeline(std::move(all));
}

Timeline Annotation::OverlapSupport() const {
  std::vector<std::pair<double, int>> events;
  for (const auto& [speaker, track] : tracks_) {
    for (const Interval& iv : track.intervals()) {
      events.emplace_back(iv.start, +1);
      events.emplace_back(iv.end, -1);
    }
  }
  // Ends sort before starts at equal times so touching turns do not overlap.
  std::sort(events.begin(), events.end());
  std::vector<Interval> out;
  int depth = 0;
  double open = 0.0;
  for (const auto& [t, delta] : events) {
    const int before = depth;
    depth += delta;
    if (before < 2 && depth >= 2) open = t;
    if (before >= 2 && depth < 2) out.push_back({open, t});
  }
  return Timeline(std::move(out));
}

double Annotation::TotalSpeech() const {
  double total = 0.0;
  for (const auto& entry : tracks_) total += entry.second.Duration();
  return total;
}

double Annotation::End() const {
  double end = 0.0;
  for (const auto& entry : tracks_) {
    end = std::max(end, entry.second.intervals().back().end);
  }
  return end;
}

Annotation Annotation::WithRecordingId(std::string recording_id) const {
  return FromTracks(std::move(recording_id), tracks_);
}

Annotation Annotation::Relabeled(
    const std::map<std::string, std::string>& mapping) const {
  std::map<std::string, Timeline> tracks;
  for (const auto& [speaker, track] : tracks_) {
    auto it = mapping.find(speaker);
    const std::string& label = it == mapping.end() ? speaker : it->second;
    auto [slot, inserted] = tracks.emplace(label, track);
    if (!inserted) slot->second = slot->second.Union(track);
  }
  return FromTracks(recording_id_, std::move(tracks));
}

Annotation Crop(const Annotation& annotation, const Timeline& keep) {
  std::map<std::string, Timeline> tracks;
  for (const auto& [speaker, track] : annotation.tracks()) {
    tracks.emplace(speaker, track.Intersect(keep));
  }
  return Annotation::FromTracks(annotation.recording_id(), std::move(tracks));
}

Annotation Crop(const Annotation& annotation, const Uem& uem) {
  auto it = uem.find(annotation.recording_id());
  if (it == uem.end()) return annotation;
  return Crop(annotation, it->second);
}

std::vector<MultiRegion> RegionizeMany(
    std::span<const Annotation* const> annotations, Interval extent) {
  std::vector<MultiRegion> regions;
  if (extent.end - extent.start <= kTimeEpsilon) return regions;

  std::vector<double> cuts{extent.start, extent.end};
  for (const Annotation* annotation : annotations) {
    for (const auto& [speaker, track] : annotation->tracks()) {
      for (const Interval& iv : track.intervals()) {
        for (double t : {iv.start, iv.end}) {
          if (t > extent.start && t < extent.end) cuts.push_back(t);
        }
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> bounds;
  for (double t : cuts) {
    if (bounds.empty() || t - bounds.back() > kTimeEpsilon) bounds.push_back(t);
  }
  // Last cut snaps to the extent end so the tiling is exact.
  if (bounds.size() >= 2) {
    bounds.back() = extent.end;
  } else {
    bounds = {extent.start, extent.end};
  }

  // Per annotation, per speaker: cursor into the speaker's intervals.
  struct Track {
    const std::vector<Interval>* intervals;
    std::size_t cursor = 0;
  };
  std::vector<std::vector<Track>> tracks(annotations.size());
  for (std::size_t a = 0; a < annotations.size(); ++a) {
    for (const auto& [speaker, track] : annotations[a]->tracks()) {
      tracks[a].push_back({&track.intervals(), 0});
    }
  }

  regions.reserve(bounds.size() - 1);
  for (std::size_t r = 0; r + 1 < bounds.size(); ++r) {
    MultiRegion region;
    region.start = bounds[r];
    region.end = bounds[r + 1];
    region.active.resize(annotations.size());
    const double mid = 0.5 * (region.start + region.end);
    for (std::size_t a = 0; a < annotations.size(); ++a) {
      for (std::size_t s = 0; s < tracks[a].size(); ++s) {
        Track& tr = tracks[a][s];
        const auto& ivs = *tr.intervals;
        while (tr.cursor < ivs.size() && ivs[tr.cursor].end <= mid) {
          ++tr.cursor;
        }
        if (tr.cursor < ivs.size() && ivs[tr.cursor].Contains(mid)) {
          region.active[a].push_back(static_cast<int>(s));
        }
      }
    }
    regions.push_back(std::move(region));
  }
  return regions;
}

std::vector<ScoringRegion> Regionize(const Annotation& ref,
                                     const Annotation& hyp, Interval extent) {
  const Annotation* pair[] = {&ref, &hyp};
  const auto ref_labels = ref.Speakers();
  const auto hyp_labels = hyp.Speakers();
  std::vector<ScoringRegion> out;
  for (const MultiRegion& mr : RegionizeMany(pair, extent)) {
    ScoringRegion region;
    region.start = mr.start;
    region.end = mr.end;
    for (int s : mr.active[0]) region.active_ref.push_back(ref_labels[s]);
    for (int s : mr.active[1]) region.active_hyp.push_back(hyp_labels[s]);
    out.push_back(std::move(region));
  }
  return out;
}

Interval CommonExtent(std::span<const Annotation* const> annotations) {
  double end = 0.0;
  for (const Annotation* annotation : annotations) {
    if (!annotation->empty()) end = std::max(end, annotation->End());
  }
  return {0.0, end};
}

}  // namespace dforge
