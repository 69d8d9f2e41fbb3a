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

#include "dforge/infer.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>

#include "dforge/assignment.hpp"
#include "dforge/error.hpp"
#include "dforge/frames.hpp"
#include "dforge/fusion.hpp"
#include "dforge/rttm.hpp"

namespace dforge {

MatrixPosteriorSource::MatrixPosteriorSource(std::vector<PosteriorMatrix> matrices,
                                             int max_speakers)
    : max_speakers_(max_speakers) {
  for (auto& m : matrices) Add(std::move(m));
}

void MatrixPosteriorSource::Add(PosteriorMatrix matrix) {
  matrix.Validate();
  std::string rec = matrix.recording_id;
  matrices_.insert_or_assign(std::move(rec), std::move(matrix));
}

std::vector<std::string> MatrixPosteriorSource::recordings() const {
  std::vector<std::string> out;
  for (const auto& entry : matrices_) out.push_back(entry.first);
  return out;
}

const PosteriorMatrix& MatrixPosteriorSource::matrix(const std::string& recording_id) const {
  auto it = matrices_.find(recording_id);
  if (it == matrices_.end()) {
    throw Error(ErrorCode::kMissingRecording, "no posteriors for '" + recording_id + "'");
  }
  return it->second;
}

double MatrixPosteriorSource::frame_shift(const std::string& recording_id) const {
  return matrix(recording_id).frame_shift;
}

Eigen::Index MatrixPosteriorSource::num_frames(const std::string& recording_id) const {
  return matrix(recording_id).num_frames();
}

PosteriorMatrix MatrixPosteriorSource::Decode(const DecodeRequest& request) {
  const PosteriorMatrix& full = matrix(request.recording_id);
  if (static_cast<Eigen::Index>(request.mask.size()) != full.num_frames()) {
    throw Error(ErrorCode::kGridMismatch, "mask length differs from stored frames");
  }
  std::vector<Eigen::Index> cols;
  for (std::size_t t = 0; t < request.mask.size(); ++t) {
    if (request.mask.values[t]) cols.push_back(static_cast<Eigen::Index>(t));
  }
  const auto m = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd sliced(full.num_speakers(), m);
  for (Eigen::Index i = 0; i < m; ++i) sliced.col(i) = full.values.col(cols[static_cast<std::size_t>(i)]);

  std::vector<Eigen::Index> rows(static_cast<std::size_t>(full.num_speakers()));
  std::iota(rows.begin(), rows.end(), 0);
  const auto keep = static_cast<std::size_t>(std::max(0, std::min(request.k_max, max_speakers_)));
  if (rows.size() > keep && request.prior && request.prior->num_frames() == m &&
      static_cast<std::size_t>(request.prior->num_speakers()) <= keep) {
    // Rows that best explain the speakers being refined, one per prior row.
    const Eigen::MatrixXd agreement = sliced * request.prior->values.transpose();
    const std::vector<int> assigned = SolveMaxAssignment(agreement);
    std::vector<Eigen::Index> chosen;
    for (std::size_t r = 0; r < assigned.size(); ++r) {
      if (assigned[r] >= 0) chosen.push_back(static_cast<Eigen::Index>(r));
    }
    rows = std::move(chosen);
  } else if (rows.size() > keep) {
    const Eigen::VectorXd activity = sliced.rowwise().sum();
    std::stable_sort(rows.begin(), rows.end(), [&](Eigen::Index a, Eigen::Index b) {
      return activity(a) > activity(b);
    });
    rows.resize(keep);
    std::sort(rows.begin(), rows.end());
  }

  PosteriorMatrix out;
  out.recording_id = full.recording_id;
  out.frame_shift = full.frame_shift;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), m);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.speaker_ids.push_back(full.speaker_ids[static_cast<std::size_t>(rows[r])]);
    out.values.row(static_cast<Eigen::Index>(r)) = sliced.row(rows[r]);
  }
  return out;
}

std::unique_ptr<PosteriorSource> MatrixPosteriorSource::Clone() const {
  return std::make_unique<MatrixPosteriorSource>(*this);
}

std::unique_ptr<MatrixPosteriorSource> FilePosteriorSource(const std::string& directory,
                                                           int max_speakers) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    throw Error(ErrorCode::kFileNotFound, "'" + directory + "' is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".post") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  auto source = std::make_unique<MatrixPosteriorSource>(std::vector<PosteriorMatrix>{}, max_speakers);
  for (const fs::path& file : files) {
    PosteriorMatrix m = ParsePosteriors(ReadTextFile(file.string()));
    if (m.recording_id != file.stem().string()) {
      throw Error(ErrorCode::kFormatError, file.string() + ": header names recording '" +
                                               m.recording_id + "'");
    }
    source->Add(std::move(m));
  }
  return source;
}

void IterConfig::Validate() const {
  if (k_first < 1 || k_first > k_later) {
    throw Error(ErrorCode::kInvalidArgument, "need 1 <= k_first <= k_later");
  }
  if (!(activity_threshold >= 0.0 && activity_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "activity_threshold must lie in [0, 1]");
  }
  if (max_rounds < 1) throw Error(ErrorCode::kInvalidArgument, "max_rounds < 1");
}

namespace {

PosteriorMatrix CheckedDecode(PosteriorSource& source, const DecodeRequest& request,
                              std::size_t masked) {
  PosteriorMatrix out;
  try {
    out = source.Decode(request);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kSourceFailure, e.what());
  }
  if (out.num_speakers() > request.k_max ||
      out.num_frames() != static_cast<Eigen::Index>(masked) ||
      (out.values.size() > 0 && (out.values.minCoeff() < 0.0 || out.values.maxCoeff() > 1.0))) {
    throw Error(ErrorCode::kSourceFailure,
                "source returned a malformed posterior matrix for '" + request.recording_id + "'");
  }
  return out;
}

std::vector<std::size_t> MaskedFrames(const BinaryStream& mask) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < mask.size(); ++t) {
    if (mask.values[t]) out.push_back(t);
  }
  return out;
}

}  // namespace

IterativeResult IterativeInference(PosteriorSource& source, const std::string& recording_id,
                                   const IterConfig& config) {
  config.Validate();
  const double shift = source.frame_shift(recording_id);
  const Eigen::Index n_frames = source.num_frames(recording_id);

  BinaryStream mask{recording_id, shift, std::vector<std::uint8_t>(static_cast<std::size_t>(n_frames), 1)};
  std::vector<std::vector<std::uint8_t>> rows;
  IterativeResult result;
  const int rounds = source.supports_masked_decoding() ? config.max_rounds : 1;

  for (int round = 0; round < rounds; ++round) {
    const std::vector<std::size_t> frames = MaskedFrames(mask);
    if (frames.empty()) break;
    const int k = std::min(round == 0 ? config.k_first : config.k_later, source.max_speakers());
    DecodeRequest request{recording_id, mask, k, std::nullopt};
    const PosteriorMatrix decoded = CheckedDecode(source, request, frames.size());

    std::vector<std::uint8_t> any_active(frames.size(), 0);
    std::vector<std::string> introduced;
    for (Eigen::Index r = 0; r < decoded.num_speakers(); ++r) {
      std::vector<std::uint8_t> row(static_cast<std::size_t>(n_frames), 0);
      bool active = false;
      for (std::size_t i = 0; i < frames.size(); ++i) {
        if (decoded.values(r, static_cast<Eigen::Index>(i)) >= config.activity_threshold) {
          row[frames[i]] = 1;
          any_active[i] = 1;
          active = true;
        }
      }
      if (!active) continue;
      introduced.push_back("spk" + std::to_string(rows.size()));
      rows.push_back(std::move(row));
    }
    const bool stop = static_cast<int>(introduced.size()) < k;
    result.round_speakers.push_back(std::move(introduced));
    if (stop) break;

    std::size_t before = frames.size(), after = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (any_active[i]) {
        mask.values[frames[i]] = 0;
      } else {
        ++after;
      }
    }
    if (after >= before) {
      throw Error(ErrorCode::kSourceFailure, "iterative inference mask did not shrink");
    }
  }

  FrameActivity activity;
  activity.frame_shift = shift;
  activity.active = ActivityMatrix::Zero(static_cast<Eigen::Index>(rows.size()), n_frames);
  for (std::size_t s = 0; s < rows.size(); ++s) {
    activity.speakers.push_back("spk" + std::to_string(s));
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      activity.active(static_cast<Eigen::Index>(s), t) = rows[s][static_cast<std::size_t>(t)] != 0;
    }
  }
  result.annotation = FromFrames(activity, recording_id);
  return result;
}

Annotation MultiKEnsemble(PosteriorSource& source, const std::string& recording_id,
                          const IterConfig& config) {
  HypothesisSet set;
  for (int k = 1; k <= 5; ++k) {
    IterConfig cfg = config;
    cfg.k_first = k;
    cfg.k_later = std::max(config.k_later, k);
    set.hypotheses.push_back(IterativeInference(source, recording_id, cfg).annotation);
  }
  return Combine(set, FusionOptions{1.0, TieRule::kModified});
}

namespace {

struct PairOrder {
  std::string a;
  std::string b;
  double co_activity = 0.0;
  int transitions = 0;
};

std::vector<PairOrder> OrderPairs(const Annotation& annotation) {
  const auto labels = annotation.Speakers();
  std::map<std::pair<std::string, std::string>, int> transitions;
  const auto& turns = annotation.turns();
  for (std::size_t i = 0; i + 1 < turns.size(); ++i) {
    const std::string& x = turns[i].speaker;
    const std::string& y = turns[i + 1].speaker;
    if (x != y) ++transitions[std::minmax(x, y)];
  }
  std::vector<PairOrder> pairs;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      PairOrder p{labels[i], labels[j], 0.0, 0};
      p.co_activity = annotation.SpeakerTimeline(p.a)
                          .Intersect(annotation.SpeakerTimeline(p.b))
                          .Duration();
      auto it = transitions.find({p.a, p.b});
      if (it != transitions.end()) p.transitions = it->second;
      pairs.push_back(std::move(p));
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const PairOrder& x, const PairOrder& y) {
    if (x.co_activity != y.co_activity) return x.co_activity > y.co_activity;
    return x.transitions > y.transitions;
  });
  return pairs;
}

}  // namespace

Annotation EendaspRefine(const Annotation& initial, PosteriorSource& pair_source,
                         const RefineOptions& options) {
  if (initial.NumSpeakers() < 2 || options.rounds < 1) return initial;
  const std::string& rec = initial.recording_id();
  const double shift = pair_source.frame_shift(rec);
  const Eigen::Index n_frames = pair_source.num_frames(rec);
  Annotation current = initial;

  for (int sweep = 0; sweep < options.rounds; ++sweep) {
    for (const PairOrder& pair : OrderPairs(current)) {
      const FrameActivity frames = ToFrames(current, shift, n_frames);
      const auto row_of = [&](const std::string& label) {
        return static_cast<Eigen::Index>(
            std::lower_bound(frames.speakers.begin(), frames.speakers.end(), label) -
            frames.speakers.begin());
      };
      const Eigen::Index ra = row_of(pair.a);
      const Eigen::Index rb = row_of(pair.b);

      BinaryStream mask{rec, shift, std::vector<std::uint8_t>(static_cast<std::size_t>(n_frames), 0)};
      Eigen::Index first = -1, last = -1;
      for (Eigen::Index t = 0; t < n_frames; ++t) {
        if (frames.active(ra, t) || frames.active(rb, t)) {
          mask.values[static_cast<std::size_t>(t)] = 1;
          if (first < 0) first = t;
          last = t;
        }
      }
      if (first < 0) continue;
      for (Eigen::Index t = first; t <= last; ++t) {
        if (!frames.active.col(t).any()) mask.values[static_cast<std::size_t>(t)] = 1;
      }
      const std::vector<std::size_t> masked = MaskedFrames(mask);
      const auto m = static_cast<Eigen::Index>(masked.size());

      PosteriorMatrix prior;
      prior.recording_id = rec;
      prior.frame_shift = shift;
      prior.speaker_ids = {pair.a, pair.b};
      prior.values.resize(2, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        const auto t = static_cast<Eigen::Index>(masked[static_cast<std::size_t>(i)]);
        prior.values(0, i) = frames.active(ra, t) ? 1.0 : 0.0;
        prior.values(1, i) = frames.active(rb, t) ? 1.0 : 0.0;
      }

      DecodeRequest request{rec, mask, 2, prior};
      const PosteriorMatrix decoded = CheckedDecode(pair_source, request, masked.size());
      Eigen::Array<bool, 2, Eigen::Dynamic> fresh = Eigen::Array<bool, 2, Eigen::Dynamic>::Zero(2, m);
      for (Eigen::Index r = 0; r < decoded.num_speakers(); ++r) {
        fresh.row(r) = decoded.values.row(r).array() >= options.activity_threshold;
      }

      // Align decoded rows to (a, b) by maximal agreement on active frames.
      const auto agree = [&](Eigen::Index row, Eigen::Index speaker) {
        return (fresh.row(row) && (prior.values.row(speaker).array() > 0.5)).count();
      };
      if (agree(1, 0) + agree(0, 1) > agree(0, 0) + agree(1, 1)) {
        fresh.row(0).swap(fresh.row(1));
      }

      std::map<std::string, Timeline> tracks = current.tracks();
      for (int which = 0; which < 2; ++which) {
        const std::string& label = which == 0 ? pair.a : pair.b;
        std::vector<Interval> add, remove;
        for (Eigen::Index i = 0; i < m; ++i) {
          const bool was = prior.values(which, i) > 0.5;
          const bool now = fresh(which, i);
          if (was == now) continue;
          const double lo = static_cast<double>(masked[static_cast<std::size_t>(i)]) * shift;
          (now ? add : remove).push_back({lo, lo + shift});
        }
        if (add.empty() && remove.empty()) continue;
        tracks[label] = tracks[label].Union(Timeline(std::move(add))).Subtract(Timeline(std::move(remove)));
      }
      current = Annotation::FromTracks(rec, std::move(tracks));
      if (current.NumSpeakers() < 2) return current;
    }
  }
  return current;
}

}  // namespace dforge
