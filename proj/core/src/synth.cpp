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

#include "dforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "dforge/error.hpp"
#include "dforge/frames.hpp"
#include "dforge/rng.hpp"

namespace dforge {

namespace {

// Stream ids keep the generators of one seed independent.
enum Stream : std::uint64_t {
  kReferenceStream = 1,
  kCorruptStream = 2,
  kWindowStream = 3,
  kPldaStream = 4,
  kPosteriorStream = 5,
  kSpeakerStreamBase = 1000,
};

double RoundMs(double t) { return std::round(t * 1000.0) / 1000.0; }

std::string SpeakerLabel(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "spk%02d", index + 1);
  return buf;
}

Eigen::MatrixXd PsdSqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::VectorXd StandardNormal(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.Normal();
  return z;
}

}  // namespace

void ScenarioSpec::Validate() const {
  if (num_speakers < 1) throw Error(ErrorCode::kInvalidArgument, "num_speakers < 1");
  if (!(duration > 0.0)) throw Error(ErrorCode::kInvalidArgument, "duration must be positive");
  if (!(mean_turn > 0.0)) throw Error(ErrorCode::kInvalidArgument, "mean_turn must be positive");
  if (!(target_overlap_ratio >= 0.0 && target_overlap_ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target_overlap_ratio must lie in [0, 1)");
  }
  if (num_speakers == 1 && target_overlap_ratio > 0.0) {
    throw Error(ErrorCode::kInfeasibleOverlap, "a single speaker cannot overlap");
  }
}

void CorruptionSpec::Validate() const {
  for (double rate : {deletion_rate, insertion_rate, confusion_rate}) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "corruption rates must lie in [0, 1]");
    }
  }
  if (!(boundary_jitter_std >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "boundary_jitter_std must be non-negative");
  }
}

double OverlapRatio(const Annotation& annotation) {
  const double speech = annotation.Support().Duration();
  return speech > 0.0 ? annotation.OverlapSupport().Duration() / speech : 0.0;
}

Annotation GenReference(const ScenarioSpec& spec) {
  spec.Validate();
  Rng rng(spec.seed, kReferenceStream);
  const int n = spec.num_speakers;
  const double target = spec.target_overlap_ratio;
  const double gap_mean = 0.5 * spec.mean_turn;
  const double gap_prob = target > 0.0 ? 0.2 : 1.0;

  std::vector<int> unused(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) unused[static_cast<std::size_t>(i)] = i;

  std::vector<Turn> turns;
  double last_start = 0.0;
  double last_end = 0.0;    // latest turn end so far
  double before_end = 0.0;  // latest end among all other turns
  int last_owner = -1;
  double overlap = 0.0, speech = 0.0;

  while (true) {
    // Fixed number of draws per turn.
    const double len = std::max(0.1, RoundMs(rng.Exponential(spec.mean_turn)));
    const double gap = RoundMs(rng.Exponential(gap_mean));
    const bool take_gap = rng.Bernoulli(gap_prob);
    const double pick = rng.Uniform();

    int speaker;
    if (!unused.empty()) {
      const auto i = static_cast<std::size_t>(pick * static_cast<double>(unused.size()));
      speaker = unused[i];
      unused.erase(unused.begin() + static_cast<std::ptrdiff_t>(i));
    } else if (n == 1) {
      speaker = 0;
    } else {
      speaker = static_cast<int>(pick * (n - 1));
      if (speaker >= last_owner) ++speaker;
    }

    double ov = 0.0;
    if (last_owner >= 0 && n > 1 && target > 0.0 && !take_gap) {
      ov = (target * (speech + len) - overlap) / (1.0 + target);
      ov = std::clamp(ov, 0.0, std::min(0.9 * len, last_end - std::max(before_end, last_start)));
      ov = std::floor(ov * 1000.0) / 1000.0;
    }
    const double start = ov > 0.0 ? RoundMs(last_end - ov) : RoundMs(last_end + gap);
    if (start >= spec.duration) break;
    const double end = std::min(RoundMs(start + len), spec.duration);
    if (end - start < 1e-3) break;

    overlap += std::max(0.0, std::min(last_end, end) - start);
    speech += std::max(0.0, end - std::max(start, last_end));
    if (end > last_end) {
      before_end = last_end;
      last_start = start;
      last_end = end;
      last_owner = speaker;
    } else {
      before_end = std::max(before_end, end);
    }
    turns.push_back({spec.recording_id, SpeakerLabel(speaker), start, end - start});
  }
  return Annotation(spec.recording_id, std::move(turns));
}

Annotation Corrupt(const Annotation& ref, const CorruptionSpec& spec) {
  spec.Validate();
  Rng rng(spec.seed, kCorruptStream);
  const std::vector<std::string> speakers = ref.Speakers();
  const double n = static_cast<double>(speakers.size());
  const double end = ref.End();
  const double mean_len = ref.empty() ? 1.0 : ref.TotalSpeech() / static_cast<double>(ref.turns().size());

  std::vector<Turn> out;
  for (const Turn& turn : ref.turns()) {
    const double u_delete = rng.Uniform();
    const double jitter_on = rng.Normal() * spec.boundary_jitter_std;
    const double jitter_off = rng.Normal() * spec.boundary_jitter_std;
    const double u_confuse = rng.Uniform();
    const double u_other = rng.Uniform();
    const double u_insert = rng.Uniform();
    const double insert_at = rng.Uniform() * end;
    const double insert_len = rng.Exponential(mean_len);
    const double u_insert_speaker = rng.Uniform();

    if (u_insert < spec.insertion_rate && insert_len > 1e-3) {
      const auto s = static_cast<std::size_t>(u_insert_speaker * n);
      out.push_back({ref.recording_id(), speakers[s], insert_at, insert_len});
    }
    if (u_delete < spec.deletion_rate) continue;

    const double onset = std::max(0.0, turn.onset + jitter_on);
    const double offset = turn.offset() + jitter_off;
    if (offset - onset <= 1e-3) continue;
    std::string label = turn.speaker;
    if (u_confuse < spec.confusion_rate && speakers.size() > 1) {
      auto s = static_cast<std::size_t>(u_other * (n - 1.0));
      if (speakers[s] >= turn.speaker) ++s;
      label = speakers[s];
    }
    out.push_back({ref.recording_id(), std::move(label), onset, offset - onset});
  }
  return Annotation(ref.recording_id(), std::move(out));
}

SyntheticEmbeddings GenEmbeddings(const Annotation& ref, const PldaModel& plda, double window,
                                  double hop, std::uint64_t seed) {
  plda.Validate();
  if (!(window > 0.0) || !(hop > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "window and hop must be positive");
  }
  SyntheticEmbeddings out;
  out.speakers = ref.Speakers();
  const Eigen::MatrixXd between_root = PsdSqrt(plda.between_class);
  const Eigen::MatrixXd within_root = PsdSqrt(plda.within_class);

  std::vector<Eigen::VectorXd> means;
  for (std::size_t s = 0; s < out.speakers.size(); ++s) {
    Rng rng(seed, kSpeakerStreamBase + s);
    means.push_back(plda.mean + between_root * StandardNormal(rng, plda.dim()));
  }

  std::vector<Eigen::VectorXd> rows;
  Rng rng(seed, kWindowStream);
  const double end = ref.End();
  for (std::size_t k = 0;; ++k) {
    const double start = static_cast<double>(k) * hop;
    if (start >= end - kTimeEpsilon) break;
    const Interval iv{start, std::min(start + window, end)};
    int best = -1;
    double best_dur = kTimeEpsilon;
    for (std::size_t s = 0; s < out.speakers.size(); ++s) {
      const double d = ref.SpeakerTimeline(out.speakers[s]).Clip(iv).Duration();
      if (d > best_dur + kTimeEpsilon) {
        best = static_cast<int>(s);
        best_dur = d;
      }
    }
    if (best < 0) continue;
    out.sequence.windows.push_back(iv);
    out.labels.push_back(best);
    rows.push_back(means[static_cast<std::size_t>(best)] + within_root * StandardNormal(rng, plda.dim()));
  }

  out.sequence.recording_id = ref.recording_id();
  out.sequence.window = window;
  out.sequence.hop = hop;
  out.sequence.vectors.resize(static_cast<Eigen::Index>(rows.size()), plda.dim());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    out.sequence.vectors.row(static_cast<Eigen::Index>(t)) = rows[t].transpose();
  }
  return out;
}

PldaModel RandomPlda(int dim, double separation, std::uint64_t seed) {
  if (dim < 1 || !(separation > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "RandomPlda needs dim >= 1 and separation > 0");
  }
  Rng rng(seed, kPldaStream);
  const auto random_spd = [&]() {
    Eigen::MatrixXd g(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = rng.Normal();
    }
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    Eigen::VectorXd d(dim);
    for (Eigen::Index i = 0; i < dim; ++i) d(i) = rng.Uniform(0.5, 1.5);
    const Eigen::MatrixXd m = q * d.asDiagonal() * q.transpose();
    return Eigen::MatrixXd(0.5 * (m + m.transpose()));
  };
  PldaModel model;
  model.mean = StandardNormal(rng, dim);
  model.within_class = random_spd();
  const Eigen::MatrixXd b = random_spd();
  model.between_class = b * (separation * model.within_class.trace() / b.trace());
  return model;
}

PosteriorMatrix GenPosteriors(const Annotation& ref, double frame_shift, double noise_std,
                              std::uint64_t seed, Eigen::Index num_frames) {
  if (!(noise_std >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "noise_std < 0");
  if (num_frames <= 0) num_frames = FramesToCover(ref.End(), frame_shift);
  const FrameActivity frames = ToFrames(ref, frame_shift, num_frames);
  PosteriorMatrix out;
  out.recording_id = ref.recording_id();
  out.frame_shift = frame_shift;
  out.speaker_ids = frames.speakers;
  out.values = frames.active.cast<double>().matrix();
  Rng rng(seed, kPosteriorStream);
  for (Eigen::Index t = 0; t < out.values.cols(); ++t) {
    for (Eigen::Index s = 0; s < out.values.rows(); ++s) {
      out.values(s, t) = std::clamp(out.values(s, t) + noise_std * rng.Normal(), 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace dforge
