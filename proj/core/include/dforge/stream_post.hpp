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

#include <span>

#include "dforge/posteriors.hpp"
#include "dforge/timeline.hpp"

namespace dforge {

// Element-wise mean of equally shaped single-row streams.
PosteriorMatrix AveragePosteriors(std::span<const PosteriorMatrix> streams);

// Frame is active when value >= theta. Uses row `row` of the matrix.
BinaryStream Threshold(const PosteriorMatrix& stream, double theta, Eigen::Index row = 0);

// Centred odd-length majority filter; frames beyond either end count as
// inactive.
BinaryStream MedianFilter(const BinaryStream& stream, int window);

// Maximal active runs as [t * shift, (t + n) * shift).
Timeline SegmentsFromStream(const BinaryStream& stream);

// Average -> threshold -> median filter -> speech timeline.
Timeline FuseVad(std::span<const PosteriorMatrix> streams, double theta, int window);

// Intersects every speaker with the VAD speech timeline.
Annotation FilterFalseAlarms(const Annotation& diar, const Timeline& vad);

// Fills VAD speech not covered by any speaker with the argmax-posterior
// speaker of each frame (ties to the lowest row). Afterwards the speech
// support contains the whole VAD timeline.
Annotation RecoverMissed(const Annotation& diar, const Timeline& vad,
                         const PosteriorMatrix& posteriors);

// On detected-overlap time covered by exactly one speaker, adds the
// temporally closest other speaker as a second speaker. Equidistant
// candidates resolve to the lexicographically smaller label.
// Renames posterior rows after the diarization speakers they share the most
// active frames with (one-to-one). Unmatched rows keep their ids unless an
// id is already taken, in which case it gets a "post_" prefix.
PosteriorMatrix AlignPosteriorRows(const PosteriorMatrix& posteriors, const Annotation& diar,
                                   double theta);

Annotation AssignOverlaps(const Annotation& diar, const Timeline& overlap);

}  // namespace dforge
