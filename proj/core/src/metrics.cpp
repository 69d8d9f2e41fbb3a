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

#include "dforge/metrics.hpp"

#include <algorithm>

#include "dforge/assignment.hpp"

namespace dforge {

OverlapMatrix ComputeOverlapMatrix(const Annotation& ref, const Annotation& hyp) {
  OverlapMatrix out;
  out.ref_labels = ref.Speakers();
  out.hyp_labels = hyp.Speakers();
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out.ref_labels.size()),
                                     static_cast<Eigen::Index>(out.hyp_labels.size()));
  for (std::size_t i = 0; i < out.ref_labels.size(); ++i) {
    const Timeline& r = ref.SpeakerTimeline(out.ref_labels[i]);
    for (std::size_t j = 0; j < out.hyp_labels.size(); ++j) {
      out.values(i, j) = r.Intersect(hyp.SpeakerTimeline(out.hyp_labels[j])).Duration();
    }
  }
  return out;
}

SpeakerMapping OptimalMapping(const OverlapMatrix& overlaps) {
  SpeakerMapping mapping;
  const auto assign = SolveMaxAssignment(overlaps.values);
  for (std::size_t i = 0; i < assign.size(); ++i) {
    const int j = assign[i];
    if (j < 0 || !(overlaps.values(i, j) > 0.0)) continue;
    mapping.hyp_to_ref.emplace(overlaps.hyp_labels[j], overlaps.ref_labels[i]);
    mapping.total_overlap += overlaps.values(i, j);
  }
  return mapping;
}

namespace {

Timeline ScoredTimeline(const Annotation& ref, const Annotation& hyp,
                        const ScoringOptions& options) {
  Timeline scored;
  bool from_uem = false;
  if (options.uem != nullptr) {
    auto it = options.uem->find(ref.recording_id());
    if (it != options.uem->end()) {
      scored = it->second;
      from_uem = true;
    }
  }
  if (!from_uem) {
    const double end = std::max(ref.empty() ? 0.0 : ref.End(),
                                hyp.empty() ? 0.0 : hyp.End());
    scored = Timeline({{0.0, end}});
  }
  if (options.collar > 0.0) {
    std::vector<Interval> no_score;
    for (const Turn& turn : ref.turns()) {
      for (double b : {turn.onset, turn.offset()}) {
        no_score.push_back({std::max(0.0, b - options.collar), b + options.collar});
      }
    }
    scored = scored.Subtract(Timeline(std::move(no_score)));
  }
  return scored;
}

struct CroppedPair {
  Annotation ref;
  Annotation hyp;
  Interval extent;
};

CroppedPair CropPair(const Annotation& ref, const Annotation& hyp,
                     const ScoringOptions& options) {
  const Timeline scored = ScoredTimeline(ref, hyp, options);
  CroppedPair out{Crop(ref, scored), Crop(hyp, scored), {0.0, 0.0}};
  if (!scored.empty()) {
    out.extent = {scored.intervals().front().start, scored.intervals().back().end};
  }
  return out;
}

DerBreakdown DerOnCropped(const CroppedPair& pair, const SpeakerMapping& mapping) {
  DerBreakdown out;
  const auto ref_labels = pair.ref.Speakers();
  const auto hyp_labels = pair.hyp.Speakers();
  std::vector<int> hyp_to_ref(hyp_labels.size(), -1);
  for (std::size_t j = 0; j < hyp_labels.size(); ++j) {
    auto it = mapping.hyp_to_ref.find(hyp_labels[j]);
    if (it == mapping.hyp_to_ref.end()) continue;
    auto pos = std::lower_bound(ref_labels.begin(), ref_labels.end(), it->second);
    hyp_to_ref[j] = static_cast<int>(pos - ref_labels.begin());
  }

  const Annotation* both[] = {&pair.ref, &pair.hyp};
  for (const MultiRegion& region : RegionizeMany(both, pair.extent)) {
    const double d = region.duration();
    const auto& active_ref = region.active[0];
    const auto& active_hyp = region.active[1];
    const auto n_ref = static_cast<double>(active_ref.size());
    const auto n_hyp = static_cast<double>(active_hyp.size());
    double n_correct = 0.0;
    for (int h : active_hyp) {
      const int r = hyp_to_ref[h];
      if (r >= 0 && std::binary_search(active_ref.begin(), active_ref.end(), r)) {
        n_correct += 1.0;
      }
    }
    out.total_ref_speech += d * n_ref;
    out.missed += d * std::max(0.0, n_ref - n_hyp);
    out.false_alarm += d * std::max(0.0, n_hyp - n_ref);
    out.confusion += d * (std::min(n_ref, n_hyp) - n_correct);
  }
  if (out.total_ref_speech > 0.0) out.der = out.errors() / out.total_ref_speech;
  return out;
}

std::optional<double> JerOnCropped(const Annotation& ref, const Annotation& hyp,
                                   const SpeakerMapping& mapping) {
  if (ref.empty()) return std::nullopt;
  std::map<std::string, std::string> ref_to_hyp;
  for (const auto& [h, r] : mapping.hyp_to_ref) ref_to_hyp.emplace(r, h);
  double sum = 0.0;
  for (const auto& [speaker, track] : ref.tracks()) {
    auto it = ref_to_hyp.find(speaker);
    if (it == ref_to_hyp.end()) {
      sum += 1.0;
      continue;
    }
    const Timeline& mapped = hyp.SpeakerTimeline(it->second);
    const double inter = track.Intersect(mapped).Duration();
    const double uni = track.Duration() + mapped.Duration() - inter;
    sum += 1.0 - inter / uni;
  }
  return sum / static_cast<double>(ref.NumSpeakers());
}

}  // namespace

DerBreakdown ComputeDer(const Annotation& ref, const Annotation& hyp,
                        const ScoringOptions& options) {
  const CroppedPair pair = CropPair(ref, hyp, options);
  const SpeakerMapping mapping =
      OptimalMapping(ComputeOverlapMatrix(pair.ref, pair.hyp));
  return DerOnCropped(pair, mapping);
}

std::optional<double> ComputeJer(const Annotation& ref, const Annotation& hyp,
                                 const Uem* uem) {
  ScoringOptions options;
  options.uem = uem;
  const CroppedPair pair = CropPair(ref, hyp, options);
  const SpeakerMapping mapping =
      OptimalMapping(ComputeOverlapMatrix(pair.ref, pair.hyp));
  return JerOnCropped(pair.ref, pair.hyp, mapping);
}

RecordingScore ScoreRecording(const Annotation& ref, const Annotation& hyp,
                              const ScoringOptions& options) {
  RecordingScore out;
  out.recording_id = ref.recording_id();
  const CroppedPair pair = CropPair(ref, hyp, options);
  const SpeakerMapping mapping =
      OptimalMapping(ComputeOverlapMatrix(pair.ref, pair.hyp));
  out.der = DerOnCropped(pair, mapping);
  if (options.collar > 0.0) {
    out.jer = ComputeJer(ref, hyp, options.uem);
  } else {
    out.jer = JerOnCropped(pair.ref, pair.hyp, mapping);
  }
  return out;
}

CorpusScore AggregateScores(const std::vector<RecordingScore>& scores) {
  CorpusScore out;
  double jer_sum = 0.0;
  int jer_count = 0;
  for (const RecordingScore& s : scores) {
    out.der.missed += s.der.missed;
    out.der.false_alarm += s.der.false_alarm;
    out.der.confusion += s.der.confusion;
    out.der.total_ref_speech += s.der.total_ref_speech;
    if (s.jer) {
      jer_sum += *s.jer;
      ++jer_count;
    }
  }
  if (out.der.total_ref_speech > 0.0) {
    out.der.der = out.der.errors() / out.der.total_ref_speech;
  }
  if (jer_count > 0) out.jer = jer_sum / jer_count;
  return out;
}

}  // namespace dforge
