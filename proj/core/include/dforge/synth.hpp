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
#include <vector>

#include "dforge/plda.hpp"
#include "dforge/posteriors.hpp"
#include "dforge/timeline.hpp"
#include "dforge/vbx.hpp"

namespace dforge {

struct ScenarioSpec {
  int num_speakers = 2;
  double duration = 60.0;
  double target_overlap_ratio = 0.0;
  double mean_turn = 2.5;
  std::uint64_t seed = 0;
  std::string recording_id = "synth";

  void Validate() const;
};

struct CorruptionSpec {
  double boundary_jitter_std = 0.0;
  double deletion_rate = 0.0;
  double insertion_rate = 0.0;
  double confusion_rate = 0.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Overlapped duration over speech (support) duration; 0 without speech.
double OverlapRatio(const Annotation& annotation);

// Alternating-speaker turns with exponential lengths. Each new turn either
// overlaps the tail of the previous one or follows a gap, chosen so the
// running overlap ratio tracks the target. Labels are "spk01", "spk02", ...
// and every speaker gets one of the first num_speakers turns.
Annotation GenReference(const ScenarioSpec& spec);

// Per turn: deletion, Gaussian jitter of both boundaries, relabelling to
// another reference speaker and, with probability insertion_rate, one extra
// turn of a random speaker at a random position. The same draws are made
// whatever the rates, so runs with different rates share randomness.
Annotation Corrupt(const Annotation& ref, const CorruptionSpec& spec);

struct SyntheticEmbeddings {
  EmbeddingSequence sequence;
  // Majority reference speaker of each window, index into `speakers`.
  std::vector<int> labels;
  std::vector<std::string> speakers;
};

// Sliding windows over [0, ref.End()); windows without speech are skipped.
// Speaker means ~ N(mean, between_class), vectors ~ N(speaker mean,
// within_class).
SyntheticEmbeddings GenEmbeddings(const Annotation& ref, const PldaModel& plda,
                                  double window, double hop, std::uint64_t seed);

// Random PLDA with trace(between) / trace(within) = separation.
PldaModel RandomPlda(int dim, double separation, std::uint64_t seed);

// Frame activity of `ref` plus N(0, noise_std) noise clipped to [0, 1].
// num_frames 0 covers [0, ref.End()).
PosteriorMatrix GenPosteriors(const Annotation& ref, double frame_shift, double noise_std,
                              std::uint64_t seed, Eigen::Index num_frames = 0);

}  // namespace dforge
