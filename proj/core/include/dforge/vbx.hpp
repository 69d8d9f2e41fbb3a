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

#include "dforge/plda.hpp"
#include "dforge/timeline.hpp"

namespace dforge {

// Windowed speaker embeddings of one recording; row t of `vectors` belongs
// to windows[t].
struct EmbeddingSequence {
  std::string recording_id;
  std::vector<Interval> windows;
  Eigen::MatrixXd vectors;
  double window = 1.5;
  double hop = 0.25;

  Eigen::Index size() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }
  void Validate() const;
};

// Defaults other than p_loop are toolkit choices, not published settings.
struct VbxParams {
  double p_loop = 0.80;
  double fa = 0.3;
  double fb = 17.0;
  int max_iters = 40;
  double elbo_tol = 1e-4;
  double min_occupancy = 0.02;

  void Validate() const;
};

struct VbxResult {
  // Per-window argmax over the surviving speakers (columns of
  // `responsibilities`).
  std::vector<int> labels;
  Eigen::MatrixXd responsibilities;  // T x S, rows sum to 1
  // Initial cluster id (after compaction) behind each surviving column.
  std::vector<int> cluster_ids;
  // ELBO after every iteration.
  std::vector<double> elbo_trace;
  // Indices into elbo_trace that follow a speaker drop; the ELBO is only
  // comparable between consecutive entries of the same stretch.
  std::vector<std::size_t> restarts;
  int iterations = 0;
  bool converged = false;
};

// VB-HMM refinement: HMM states are speakers with self-loop p_loop and the
// remaining mass spread uniformly over the other states; emissions are
// Gaussian in the PLDA eigenvoice space.
VbxResult VbxCluster(const EmbeddingSequence& seq, const PldaModel& plda,
                     const std::vector<int>& init_labels, const VbxParams& params);

// Turns from per-window labels: overlapping windows hand over at the
// midpoint between their centres.
Annotation WindowLabelsToAnnotation(const EmbeddingSequence& seq,
                                    const std::vector<int>& labels,
                                    const std::string& label_prefix = "spk");

// PLDA-LLR average-linkage AHC at `ahc_threshold`, VBx refinement, then
// turns. An empty sequence yields an empty annotation.
Annotation DiarizeEmbeddings(const EmbeddingSequence& seq, const PldaModel& plda,
                             double ahc_threshold, const VbxParams& params,
                             const std::string& label_prefix = "spk");

}  // namespace dforge
