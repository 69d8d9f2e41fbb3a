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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dforge/posteriors.hpp"
#include "dforge/timeline.hpp"

namespace dforge {

struct DecodeRequest {
  std::string recording_id;
  // Over the source's full frame grid; only active frames are decoded.
  BinaryStream mask;
  int k_max = 5;
  // Current activity (0/1) of the speakers being refined, restricted to the
  // masked frames. Only set by pair refinement; models may ignore it.
  std::optional<PosteriorMatrix> prior;
};

// Anything that turns frames of a recording into per-speaker posteriors,
// typically an EEND-style model or a dump of its outputs.
class PosteriorSource {
 public:
  virtual ~PosteriorSource() = default;

  virtual int max_speakers() const { return 5; }
  // Sources that need contiguous input (order-dependent encoders) return
  // false; iterative inference then runs a single round.
  virtual bool supports_masked_decoding() const { return true; }
  virtual double frame_shift(const std::string& recording_id) const = 0;
  virtual Eigen::Index num_frames(const std::string& recording_id) const = 0;

  // At most k_max rows; column i belongs to the i-th masked frame.
  virtual PosteriorMatrix Decode(const DecodeRequest& request) = 0;

  // Per-worker copies; a single instance serves one decode at a time.
  virtual std::unique_ptr<PosteriorSource> Clone() const = 0;
};

// Serves stored full-recording matrices: Decode slices the masked columns
// and keeps the k_max rows with the largest summed activity over them. With
// a prior it keeps instead the rows matching the prior's speakers.
class MatrixPosteriorSource : public PosteriorSource {
 public:
  MatrixPosteriorSource() = default;
  explicit MatrixPosteriorSource(std::vector<PosteriorMatrix> matrices, int max_speakers = 5);

  void Add(PosteriorMatrix matrix);
  std::vector<std::string> recordings() const;
  const PosteriorMatrix& matrix(const std::string& recording_id) const;

  int max_speakers() const override { return max_speakers_; }
  double frame_shift(const std::string& recording_id) const override;
  Eigen::Index num_frames(const std::string& recording_id) const override;
  PosteriorMatrix Decode(const DecodeRequest& request) override;
  std::unique_ptr<PosteriorSource> Clone() const override;

 private:
  std::map<std::string, PosteriorMatrix> matrices_;
  int max_speakers_ = 5;
};

// Loads every "<rec>.post" file of a directory.
std::unique_ptr<MatrixPosteriorSource> FilePosteriorSource(const std::string& directory,
                                                           int max_speakers = 5);

struct IterConfig {
  int k_first = 5;
  int k_later = 5;
  double activity_threshold = 0.5;
  int max_rounds = 10;

  void Validate() const;
};

struct IterativeResult {
  Annotation annotation;
  // Speaker labels introduced in each round.
  std::vector<std::vector<std::string>> round_speakers;
};

// Decode up to K speakers on the current mask; stop when fewer than K are
// active, otherwise keep only frames where every decoded speaker is silent
// and decode again with K = k_later.
IterativeResult IterativeInference(PosteriorSource& source, const std::string& recording_id,
                                   const IterConfig& config);

// Iterative inference with k_first = 1..5, fused by modified DOVER-Lap with
// equal weights.
Annotation MultiKEnsemble(PosteriorSource& source, const std::string& recording_id,
                          const IterConfig& config);

struct RefineOptions {
  int rounds = 1;
  double activity_threshold = 0.5;
};

// EEND-as-post-processing: repeatedly re-decodes speaker pairs (most
// co-active first) with a two-speaker source and rewrites their activity on
// the decoded frames.
Annotation EendaspRefine(const Annotation& initial, PosteriorSource& pair_source,
                         const RefineOptions& options = {});

}  // namespace dforge
