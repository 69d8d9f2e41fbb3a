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

#include "dforge/stream_post.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "dforge/error.hpp"
#include "dforge/frames.hpp"
#include "dforge/metrics.hpp"

namespace dforge {

PosteriorMatrix AveragePosteriors(std::span<const PosteriorMatrix> streams) {
  if (streams.empty()) throw Error(ErrorCode::kInvalidArgument, "no streams to average");
  const PosteriorMatrix& first = streams.front();
  PosteriorMatrix out = first;
  for (std::size_t i = 1; i < streams.size(); ++i) {
    const PosteriorMatrix& s = streams[i];
    if (s.values.rows() != first.values.rows() || s.values.cols() != first.values.cols() ||
        std::abs(s.frame_shift - first.frame_shift) > 1e-12) {
      throw Error(ErrorCode::kLengthMismatch, "posterior streams differ in shape or frame shift");
    }
    out.values += s.values;
  }
  out.values /= static_cast<double>(streams.size());
  // Keep the mean inside the input range despite rounding.
  out.values = out.values.cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

BinaryStream Threshold(const PosteriorMatrix& stream, double theta, Eigen::Index row) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must lie in [0, 1]");
  }
  if (row < 0 || row >= stream.num_speakers()) {
    throw Error(ErrorCode::kInvalidArgument, "posterior row out of range");
  }
  BinaryStream out{stream.recording_id, stream.frame_shift, {}};
  out.values.resize(static_cast<std::size_t>(stream.num_frames()));
  for (Eigen::Index t = 0; t < stream.num_frames(); ++t) {
    out.values[static_cast<std::size_t>(t)] = stream.values(row, t) >= theta ? 1 : 0;
  }
  return out;
}

BinaryStream MedianFilter(const BinaryStream& stream, int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::kEvenWindow, "median window must be a positive odd count");
  }
  const auto n = static_cast<long>(stream.size());
  const long half = window / 2;
  BinaryStream out{stream.recording_id, stream.frame_shift, {}};
  out.values.assign(stream.size(), 0);
  long count = 0;
  for (long t = 0; t <= std::min(half, n - 1); ++t) count += stream.values[t];
  for (long t = 0; t < n; ++t) {
    out.values[t] = count > half ? 1 : 0;
    const long enter = t + half + 1;
    const long leave = t - half;
    if (enter < n) count += stream.values[enter];
    if (leave >= 0) count -= stream.values[leave];
  }
  return out;
}

Timeline SegmentsFromStream(const BinaryStream& stream) {
  std::vector<Interval> runs;
  const std::size_t n = stream.size();
  std::size_t t = 0;
  while (t < n) {
    if (!stream.values[t]) {
      ++t;
      continue;
    }
    std::size_t u = t;
    while (u < n && stream.values[u]) ++u;
    runs.push_back({static_cast<double>(t) * stream.frame_shift,
                    static_cast<double>(u) * stream.frame_shift});
    t = u;
  }
  return Timeline(std::move(runs));
}

Timeline FuseVad(std::span<const PosteriorMatrix> streams, double theta, int window) {
  return SegmentsFromStream(MedianFilter(Threshold(AveragePosteriors(streams), theta), window));
}

Annotation FilterFalseAlarms(const Annotation& diar, const Timeline& vad) {
  return Crop(diar, vad);
}

Annotation RecoverMissed(const Annotation& diar, const Timeline& vad,
                         const PosteriorMatrix& posteriors) {
  posteriors.Validate();
  const Timeline uncovered = vad.Subtract(diar.Support());
  std::map<std::string, Timeline> tracks = diar.tracks();
  if (uncovered.empty()) return diar;

  const double shift = posteriors.frame_shift;
  std::map<std::string, std::vector<Interval>> added;
  for (const Interval& gap : uncovered.intervals()) {
    auto k = static_cast<Eigen::Index>(std::floor((gap.start + kTimeEpsilon) / shift));
    for (; static_cast<double>(k) * shift < gap.end - kTimeEpsilon; ++k) {
      if (k >= posteriors.num_frames() || posteriors.num_speakers() == 0) {
        throw Error(ErrorCode::kMissingPosteriors,
                    "no posterior frame covers t=" +
                        std::to_string(static_cast<double>(k) * shift) + " of '" +
                        diar.recording_id() + "'");
      }
      Eigen::Index best = 0;
      posteriors.values.col(k).maxCoeff(&best);
      const double lo = std::max(gap.start, static_cast<double>(k) * shift);
      const double hi = std::min(gap.end, static_cast<double>(k + 1) * shift);
      if (hi > lo) added[posteriors.speaker_ids[best]].push_back({lo, hi});
    }
  }
  for (auto& [speaker, ivs] : added) {
    Timeline piece(std::move(ivs));
    auto [slot, inserted] = tracks.emplace(speaker, piece);
    if (!inserted) slot->second = slot->second.Union(piece);
  }
  return Annotation::FromTracks(diar.recording_id(), std::move(tracks));
}

PosteriorMatrix AlignPosteriorRows(const PosteriorMatrix& posteriors, const Annotation& diar,
                                   double theta) {
  posteriors.Validate();
  FrameActivity rows;
  rows.frame_shift = posteriors.frame_shift;
  rows.active.resize(posteriors.num_speakers(), posteriors.num_frames());
  for (Eigen::Index r = 0; r < posteriors.num_speakers(); ++r) {
    rows.speakers.push_back("row" + std::to_string(r));
    rows.active.row(r) = posteriors.values.row(r).array() >= theta;
  }
  // FromFrames drops silent rows; they stay unmatched.
  const Annotation row_ann = FromFrames(rows, diar.recording_id());
  const SpeakerMapping mapping = OptimalMapping(ComputeOverlapMatrix(diar, row_ann));

  PosteriorMatrix out = posteriors;
  std::set<std::string> taken;
  std::vector<bool> matched(posteriors.speaker_ids.size(), false);
  for (std::size_t r = 0; r < out.speaker_ids.size(); ++r) {
    auto it = mapping.hyp_to_ref.find("row" + std::to_string(r));
    if (it == mapping.hyp_to_ref.end()) continue;
    out.speaker_ids[r] = it->second;
    matched[r] = true;
    taken.insert(it->second);
  }
  for (const std::string& label : diar.Speakers()) taken.insert(label);
  for (std::size_t r = 0; r < out.speaker_ids.size(); ++r) {
    if (matched[r]) continue;
    std::string id = out.speaker_ids[r];
    while (taken.count(id)) id = "post_" + id;
    out.speaker_ids[r] = id;
    taken.insert(id);
  }
  return out;
}

namespace {

struct Neighbor {
  const std::string* label = nullptr;
  double time = 0.0;
};

}  // namespace

Annotation AssignOverlaps(const Annotation& diar, const Timeline& overlap) {
  if (diar.NumSpeakers() < 2 || overlap.empty()) return diar;
  const auto labels = diar.Speakers();
  std::map<std::string, std::vector<Interval>> added;
  const Annotation* one[] = {&diar};

  for (const Interval& span : overlap.intervals()) {
    for (const MultiRegion& region : RegionizeMany(one, span)) {
      if (region.active[0].size() != 1) continue;
      const int current = region.active[0].front();

      // Closest activity of any other speaker before and after the region.
      Neighbor left, right;
      for (std::size_t c = 0; c < labels.size(); ++c) {
        if (static_cast<int>(c) == current) continue;
        const auto& ivs = diar.SpeakerTimeline(labels[c]).intervals();
        auto it = std::lower_bound(ivs.begin(), ivs.end(), region.start,
                                   [](const Interval& iv, double t) { return iv.end <= t + kTimeEpsilon; });
        if (it != ivs.begin()) {
          const double end = std::prev(it)->end;
          if (left.label == nullptr || end > left.time) left = {&labels[c], end};
        }
        auto jt = std::lower_bound(ivs.begin(), ivs.end(), region.end - kTimeEpsilon,
                                   [](const Interval& iv, double t) { return iv.start < t; });
        if (jt != ivs.end()) {
          if (right.label == nullptr || jt->start < right.time) right = {&labels[c], jt->start};
        }
      }
      if (left.label == nullptr && right.label == nullptr) continue;
      if (right.label == nullptr || (left.label != nullptr && left.label == right.label)) {
        added[*left.label].push_back({region.start, region.end});
        continue;
      }
      if (left.label == nullptr) {
        added[*right.label].push_back({region.start, region.end});
        continue;
      }
      const double mid = std::clamp(0.5 * (left.time + right.time), region.start, region.end);
      if (mid > region.start) added[*left.label].push_back({region.start, mid});
      if (mid < region.end) added[*right.label].push_back({mid, region.end});
    }
  }

  std::map<std::string, Timeline> tracks = diar.tracks();
  for (auto& [speaker, ivs] : added) {
    tracks[speaker] = tracks[speaker].Union(Timeline(std::move(ivs)));
  }
  return Annotation::FromTracks(diar.recording_id(), std::move(tracks));
}

}  // namespace dforge
