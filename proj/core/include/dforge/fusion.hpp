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

#include "dforge/timeline.hpp"

namespace dforge {

struct HypothesisSet {
  std::vector<Annotation> hypotheses;
  // One positive weight per hypothesis; empty means all 1.
  std::vector<double> manual_weights;

  std::size_t size() const { return hypotheses.size(); }
  double weight(std::size_t k) const {
    return manual_weights.empty() ? 1.0 : manual_weights[k];
  }
  // Throws on K == 0, weight count mismatch, non-positive weights or mixed
  // recordings.
  void Validate() const;
};

// Indexed by input position.
struct RankWeights {
  std::vector<double> scores;        // mean pairwise DER with H_k as reference
  std::vector<int> ranks;            // 1..K, ascending w_k * s_k
  std::vector<double> vote_weights;  // (1/rank)^p, normalised to sum 1
};

enum class TieRule {
  kModified,  // every speaker tied at the cutoff keeps the whole region
  kOriginal,  // tied speakers split the region into equal consecutive parts
};

struct FusionOptions {
  double rank_exponent = 1.0;
  TieRule tie_rule = TieRule::kModified;
};

RankWeights RankHypotheses(const HypothesisSet& set, double rank_exponent = 1.0);

// Relabels every hypothesis into the rank-1 hypothesis' label space. Others
// are mapped in rank order against the union of the hypotheses mapped so
// far; speakers left unmapped get fresh labels.
HypothesisSet MapLabels(const HypothesisSet& set, const RankWeights& weights);

Annotation Vote(const HypothesisSet& mapped, const RankWeights& weights,
                TieRule tie_rule);

Annotation Combine(const HypothesisSet& set, const FusionOptions& options = {});

TieRule ParseTieRule(const std::string& name);

}  // namespace dforge
