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
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dforge/timeline.hpp"

namespace dforge {

// Entry (i, j): seconds during which reference speaker i and hypothesis
// speaker j are both active. Labels are in lexicographic order.
struct OverlapMatrix {
  std::vector<std::string> ref_labels;
  std::vector<std::string> hyp_labels;
  Eigen::MatrixXd values;
};

OverlapMatrix ComputeOverlapMatrix(const Annotation& ref, const Annotation& hyp);

// Partial injective hypothesis -> reference map. Pairs with no shared time
// are never mapped.
struct SpeakerMapping {
  std::map<std::string, std::string> hyp_to_ref;
  double total_overlap = 0.0;
};

SpeakerMapping OptimalMapping(const OverlapMatrix& overlaps);

struct DerBreakdown {
  double missed = 0.0;
  double false_alarm = 0.0;
  double confusion = 0.0;
  double total_ref_speech = 0.0;
  // Empty when the reference holds no speech.
  std::optional<double> der;

  double errors() const { return missed + false_alarm + confusion; }
};

struct ScoringOptions {
  double collar = 0.0;
  const Uem* uem = nullptr;
};

// Region-based DER under the optimal mapping. Overlapped speech is always
// scored; a collar excises +/- collar seconds around each reference turn
// boundary.
DerBreakdown ComputeDer(const Annotation& ref, const Annotation& hyp,
                        const ScoringOptions& options = {});

// Mean over reference speakers of 1 - |ref_i & hyp_m(i)| / |ref_i | hyp_m(i)|
// using the DER mapping; unmapped speakers count 1. Computed per recording.
std::optional<double> ComputeJer(const Annotation& ref, const Annotation& hyp,
                                 const Uem* uem = nullptr);

struct RecordingScore {
  std::string recording_id;
  DerBreakdown der;
  std::optional<double> jer;
};

RecordingScore ScoreRecording(const Annotation& ref, const Annotation& hyp,
                              const ScoringOptions& options = {});

// Corpus totals: MI/FA/CF seconds are summed, DER is pooled, JER is the mean
// of the defined per-recording values.
struct CorpusScore {
  DerBreakdown der;
  std::optional<double> jer;
};

CorpusScore AggregateScores(const std::vector<RecordingScore>& scores);

}  // namespace dforge
