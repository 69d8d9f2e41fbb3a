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

#include "dforge/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "dforge/error.hpp"
#include "dforge/metrics.hpp"

namespace dforge {

void HypothesisSet::Validate() const {
  if (hypotheses.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "hypothesis set is empty");
  }
  if (!manual_weights.empty() && manual_weights.size() != hypotheses.size()) {
    throw Error(ErrorCode::kWeightCountMismatch,
                std::to_string(manual_weights.size()) + " weights for " +
                    std::to_string(hypotheses.size()) + " hypotheses");
  }
  for (double w : manual_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kNonPositiveWeight, "manual weights must be positive");
    }
  }
  for (const Annotation& h : hypotheses) {
    if (h.recording_id() != hypotheses.front().recording_id()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "hypotheses belong to different recordings");
    }
  }
}

namespace {

// DER with `ref` as reference. An empty reference scores 0 against an empty
// hypothesis and 1 otherwise.
double PairwiseDer(const Annotation& ref, const Annotation& hyp) {
  const DerBreakdown der = ComputeDer(ref, hyp);
  if (der.der) return *der.der;
  return hyp.empty() ? 0.0 : 1.0;
}

std::vector<std::size_t> RankOrder(const RankWeights& weights) {
  std::vector<std::size_t> order(weights.ranks.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    order[static_cast<std::size_t>(weights.ranks[k] - 1)] = k;
  }
  return order;
}

}  // namespace

RankWeights RankHypotheses(const HypothesisSet& set, double rank_exponent) {
  set.Validate();
  const std::size_t k_count = set.size();
  RankWeights out;
  out.scores.assign(k_count, 0.0);
  if (k_count > 1) {
    for (std::size_t k = 0; k < k_count; ++k) {
      double sum = 0.0;
      for (std::size_t other = 0; other < k_count; ++other) {
        if (other != k) sum += PairwiseDer(set.hypotheses[k], set.hypotheses[other]);
      }
      out.scores[k] = sum / static_cast<double>(k_count - 1);
    }
  }

  std::vector<std::size_t> order(k_count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return set.weight(a) * out.scores[a] < set.weight(b) * out.scores[b];
  });
  out.ranks.assign(k_count, 0);
  for (std::size_t r = 0; r < k_count; ++r) out.ranks[order[r]] = static_cast<int>(r + 1);

  out.vote_weights.assign(k_count, 0.0);
  double norm = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    out.vote_weights[k] = std::pow(1.0 / out.ranks[k], rank_exponent);
    norm += out.vote_weights[k];
  }
  for (double& w : out.vote_weights) w /= norm;
  return out;
}

HypothesisSet MapLabels(const HypothesisSet& set, const RankWeights& weights) {
  HypothesisSet out = set;
  const auto order = RankOrder(weights);
  const std::size_t anchor = order.front();

  std::map<std::string, Timeline> merged = set.hypotheses[anchor].tracks();
  std::set<std::string> used;
  for (const auto& entry : merged) used.insert(entry.first);
  const std::string& rec = set.hypotheses[anchor].recording_id();

  for (std::size_t r = 1; r < order.size(); ++r) {
    const std::size_t k = order[r];
    const Annotation& hyp = set.hypotheses[k];
    const Annotation pooled = Annotation::FromTracks(rec, merged);
    const SpeakerMapping mapping = OptimalMapping(ComputeOverlapMatrix(pooled, hyp));

    std::map<std::string, std::string> relabel = mapping.hyp_to_ref;
    for (const std::string& label : hyp.Speakers()) {
      if (relabel.count(label)) continue;
      std::string fresh = label;
      for (int n = 1; used.count(fresh); ++n) {
        fresh = label + "_" + std::to_string(n);
      }
      used.insert(fresh);
      relabel.emplace(label, fresh);
    }
    out.hypotheses[k] = hyp.Relabeled(relabel);
    for (const auto& [label, track] : out.hypotheses[k].tracks()) {
      auto [slot, inserted] = merged.emplace(label, track);
      if (!inserted) slot->second = slot->second.Union(track);
    }
  }
  return out;
}

Annotation Vote(const HypothesisSet& mapped, const RankWeights& weights,
                TieRule tie_rule) {
  mapped.Validate();
  const std::size_t k_count = mapped.size();
  std::vector<const Annotation*> ptrs;
  std::vector<std::vector<std::string>> labels;
  for (const Annotation& h : mapped.hypotheses) {
    ptrs.push_back(&h);
    labels.push_back(h.Speakers());
  }
  const Interval extent = CommonExtent(ptrs);
  constexpr double kVoteEps = 1e-9;

  std::map<std::string, std::vector<Interval>> out_tracks;
  for (const MultiRegion& region : RegionizeMany(ptrs, extent)) {
    std::map<std::string, double> votes;
    double count = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      const double w = weights.vote_weights[k];
      count += w * static_cast<double>(region.active[k].size());
      for (int s : region.active[k]) votes[labels[k][s]] += w;
    }
    const auto target = static_cast<std::size_t>(std::floor(count + 0.5 + kVoteEps));
    if (target == 0 || votes.empty()) continue;

    std::vector<std::pair<std::string, double>> ranked(votes.begin(), votes.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    const double cutoff = ranked[std::min(target, ranked.size()) - 1].second;

    std::vector<std::string> tied;
    for (const auto& [label, v] : ranked) {
      if (v > cutoff + kVoteEps) {
        out_tracks[label].push_back({region.start, region.end});
      } else if (v >= cutoff - kVoteEps) {
        tied.push_back(label);
      }
    }
    if (tied.size() == 1 || tie_rule == TieRule::kModified) {
      for (const std::string& label : tied) {
        out_tracks[label].push_back({region.start, region.end});
      }
    } else {
      const double step = region.duration() / static_cast<double>(tied.size());
      for (std::size_t i = 0; i < tied.size(); ++i) {
        const double lo = region.start + step * static_cast<double>(i);
        const double hi = i + 1 == tied.size() ? region.end : lo + step;
        out_tracks[tied[i]].push_back({lo, hi});
      }
    }
  }

  std::map<std::string, Timeline> tracks;
  for (auto& [label, ivs] : out_tracks) tracks.emplace(label, Timeline(std::move(ivs)));
  return Annotation::FromTracks(mapped.hypotheses.front().recording_id(),
                                std::move(tracks));
}

Annotation Combine(const HypothesisSet& set, const FusionOptions& options) {
  set.Validate();
  if (set.size() == 1) return set.hypotheses.front();
  const RankWeights weights = RankHypotheses(set, options.rank_exponent);
  const HypothesisSet mapped = MapLabels(set, weights);
  return Vote(mapped, weights, options.tie_rule);
}

TieRule ParseTieRule(const std::string& name) {
  if (name == "modified") return TieRule::kModified;
  if (name == "original") return TieRule::kOriginal;
  throw Error(ErrorCode::kInvalidArgument, "unknown tie rule '" + name + "'");
}

}  // namespace dforge
