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

#include <gtest/gtest.h>

#include "dforge/error.hpp"
#include "dforge/frames.hpp"
#include "dforge/metrics.hpp"
#include "dforge/rng.hpp"
#include "dforge/stream_post.hpp"
#include "dforge/synth.hpp"
#include "test_support.hpp"

namespace dforge {
namespace {

using testing::MakeAnnotation;

PosteriorMatrix Row(std::vector<double> v, double shift = 0.01) {
  PosteriorMatrix m;
  m.recording_id = "rec1";
  m.frame_shift = shift;
  m.speaker_ids = {"speech"};
  m.values = Eigen::Map<Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return m;
}

BinaryStream Bits(std::vector<std::uint8_t> v, double shift = 0.01) {
  return BinaryStream{"rec1", shift, std::move(v)};
}

TEST(AveragePosteriors, Examples) {
  const std::vector<PosteriorMatrix> two = {Row({0.6}), Row({0.8})};
  EXPECT_NEAR(AveragePosteriors(two).values(0, 0), 0.7, 1e-12);
  const std::vector<PosteriorMatrix> copies = {Row({0.1, 0.9}), Row({0.1, 0.9}), Row({0.1, 0.9})};
  EXPECT_TRUE(AveragePosteriors(copies).values.isApprox(Row({0.1, 0.9}).values));
  const std::vector<PosteriorMatrix> bad = {Row({0.1}), Row({0.1, 0.2})};
  try {
    AveragePosteriors(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

TEST(Threshold, ClosedComparison) {
  EXPECT_EQ(Threshold(Row({0.2, 0.5, 0.9}), 0.5).values, (std::vector<std::uint8_t>{0, 1, 1}));
  EXPECT_EQ(Threshold(Row({0.0, 0.5}), 0.0).values, (std::vector<std::uint8_t>{1, 1}));
  EXPECT_EQ(Threshold(Row({0.2, 0.5}), 0.6).values, (std::vector<std::uint8_t>{0, 0}));
}

TEST(MedianFilter, HandExample) {
  const BinaryStream in = Bits({0, 1, 0, 0, 1, 1, 1, 0, 1});
  const BinaryStream out = MedianFilter(in, 3);
  EXPECT_EQ(out.values, (std::vector<std::uint8_t>{0, 0, 0, 0, 1, 1, 1, 1, 0}));
  EXPECT_EQ(MedianFilter(out, 3).values, out.values);
  EXPECT_EQ(MedianFilter(in, 1).values, in.values);
  try {
    MedianFilter(in, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEvenWindow);
  }
}

// Brute-force majority over the zero-padded window.
TEST(MedianFilter, MatchesDirectMajority) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> v(1 + rng.UniformInt(40));
    for (auto& x : v) x = rng.Bernoulli(0.5);
    const int w = 1 + 2 * static_cast<int>(rng.UniformInt(6));
    const auto out = MedianFilter(Bits(v), w).values;
    for (int t = 0; t < static_cast<int>(v.size()); ++t) {
      int ones = 0;
      for (int k = t - w / 2; k <= t + w / 2; ++k) {
        if (k >= 0 && k < static_cast<int>(v.size())) ones += v[static_cast<std::size_t>(k)];
      }
      ASSERT_EQ(out[static_cast<std::size_t>(t)], ones > w / 2 ? 1 : 0);
    }
  }
}

// Repeated filtering reaches a root signal; a single pass is not always one
// (an alternating run shrinks by one frame per side each pass).
TEST(MedianFilter, ConvergesToRoot) {
  const BinaryStream alt = Bits({1, 0, 1, 0, 1});
  EXPECT_NE(MedianFilter(MedianFilter(alt, 3), 3).values, MedianFilter(alt, 3).values);
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint8_t> v(60);
    for (auto& x : v) x = rng.Bernoulli(0.5);
    BinaryStream s = Bits(v);
    bool settled = false;
    for (int pass = 0; pass < 60 && !settled; ++pass) {
      const BinaryStream next = MedianFilter(s, 5);
      settled = next.values == s.values;
      s = next;
    }
    EXPECT_TRUE(settled);
  }
}

TEST(Segments, Examples) {
  const Timeline t = SegmentsFromStream(Bits({0, 1, 1, 0}));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_NEAR(t.intervals()[0].start, 0.01, 1e-12);
  EXPECT_NEAR(t.intervals()[0].end, 0.03, 1e-12);
  EXPECT_TRUE(SegmentsFromStream(Bits({0, 0})).empty());
  const Annotation a = MakeAnnotation({{"speech", 0.1, 0.3}, {"speech", 0.5, 0.6}});
  const FrameActivity f = ToFrames(a, 0.1, 8);
  BinaryStream s = Bits(std::vector<std::uint8_t>(8), 0.1);
  for (int t = 0; t < 8; ++t) s.values[static_cast<std::size_t>(t)] = f.active(0, t);
  const Timeline back = SegmentsFromStream(s);
  EXPECT_EQ(back.size(), 2u);
  EXPECT_NEAR(back.Duration(), 0.3, 1e-9);
}

TEST(FilterFalseAlarms, Examples) {
  const Annotation d = MakeAnnotation({{"A", 0, 10}});
  EXPECT_EQ(FilterFalseAlarms(d, Timeline({{2, 8}})), MakeAnnotation({{"A", 2, 8}}));
  EXPECT_TRUE(FilterFalseAlarms(d, Timeline()).empty());
  EXPECT_EQ(FilterFalseAlarms(d, Timeline({{0, 20}})), d);
}

TEST(RecoverMissed, FillsFromArgmax) {
  PosteriorMatrix post;
  post.recording_id = "rec1";
  post.frame_shift = 0.5;
  post.speaker_ids = {"spk1", "spk2"};
  post.values = Eigen::MatrixXd::Zero(2, 20);
  post.values.row(0).head(12).setConstant(0.9);
  post.values.row(1).tail(8).setConstant(0.8);
  const Annotation diar = MakeAnnotation({{"spk1", 0, 6}});
  const Annotation out = RecoverMissed(diar, Timeline({{0, 10}}), post);
  EXPECT_EQ(out.SpeakerTimeline("spk2"), Timeline({{6, 10}}));
  EXPECT_EQ(out.SpeakerTimeline("spk1"), Timeline({{0, 6}}));
  EXPECT_EQ(RecoverMissed(diar, Timeline({{0, 6}}), post), diar);
}

TEST(RecoverMissed, TiesGoToLowestRow) {
  PosteriorMatrix post;
  post.recording_id = "rec1";
  post.frame_shift = 1.0;
  post.speaker_ids = {"b", "a"};
  post.values = Eigen::MatrixXd::Constant(2, 4, 0.5);
  const Annotation out = RecoverMissed(Annotation("rec1"), Timeline({{0, 4}}), post);
  EXPECT_EQ(out.Speakers(), std::vector<std::string>{"b"});
}

TEST(RecoverMissed, MissingPosteriors) {
  PosteriorMatrix post;
  post.recording_id = "rec1";
  post.frame_shift = 1.0;
  post.speaker_ids = {"a"};
  post.values = Eigen::MatrixXd::Constant(1, 2, 0.5);
  try {
    RecoverMissed(Annotation("rec1"), Timeline({{0, 4}}), post);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingPosteriors);
  }
}

TEST(AlignPosteriorRows, RenamesByCoActivity) {
  PosteriorMatrix post;
  post.recording_id = "rec1";
  post.frame_shift = 1.0;
  post.speaker_ids = {"spk0", "spk1", "spk2"};
  post.values = Eigen::MatrixXd::Zero(3, 10);
  post.values.row(0).segment(5, 5).setConstant(0.9);
  post.values.row(1).segment(0, 5).setConstant(0.9);
  post.values(2, 9) = 0.9;
  const Annotation diar = MakeAnnotation({{"x", 0, 5}, {"spk2", 5, 10}});
  const PosteriorMatrix out = AlignPosteriorRows(post, diar, 0.5);
  EXPECT_EQ(out.speaker_ids, (std::vector<std::string>{"spk2", "x", "post_spk2"}));
  EXPECT_EQ(out.values, post.values);
}

TEST(PostProcessing, SupportInvariants) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Annotation ref = GenReference({3, 60.0, 0.2, 2.5, seed, "rec1"});
    const Annotation diar = Corrupt(ref, {0.3, 0.1, 0.1, 0.1, seed});
    const PosteriorMatrix post = GenPosteriors(ref, 0.01, 0.3, seed, FramesToCover(std::max(ref.End(), diar.End()), 0.01));
    Annotation speech = Annotation::FromTracks("rec1", {{"speech", ref.Support()}});
    const PosteriorMatrix vad_post = GenPosteriors(speech, 0.01, 0.3, seed + 1, post.num_frames());
    const std::vector<PosteriorMatrix> streams = {vad_post};
    const Timeline vad = FuseVad(streams, 0.5, 11);
    const Annotation filtered = FilterFalseAlarms(diar, vad);
    EXPECT_TRUE(filtered.Support().Subtract(vad).empty());
    const Annotation recovered = RecoverMissed(filtered, vad, post);
    const double sym = recovered.Support().Subtract(vad).Duration() + vad.Subtract(recovered.Support()).Duration();
    EXPECT_LE(sym, 1e-3);
  }
}

TEST(AssignOverlaps, Examples) {
  const Annotation d = MakeAnnotation({{"A", 0, 5}, {"B", 5, 10}});
  const Annotation out = AssignOverlaps(d, Timeline({{4.8, 5.2}}));
  EXPECT_EQ(out.OverlapSupport(), Timeline({{4.8, 5.2}}));
  const Annotation single = MakeAnnotation({{"A", 0, 5}});
  EXPECT_EQ(AssignOverlaps(single, Timeline({{1, 2}})), single);
  // C is 1 s from the overlap on either side of A's turn; B wins on ties.
  const Annotation tie = MakeAnnotation({{"C", 0, 1}, {"A", 2, 3}, {"B", 4, 5}});
  const Annotation t = AssignOverlaps(tie, Timeline({{2.5, 2.5 + 1e-3}}));
  EXPECT_TRUE(t.SpeakerTimeline("B").Contains(2.5005) || t.SpeakerTimeline("C").Contains(2.5005));
  EXPECT_FALSE(t.SpeakerTimeline("C").Contains(2.5005) && t.SpeakerTimeline("B").Contains(2.5005));
}

TEST(AssignOverlaps, SplitsAtNeighborMidpoint) {
  const Annotation d = MakeAnnotation({{"B", 0, 1}, {"A", 2, 3}, {"C", 4, 5}});
  const Annotation out = AssignOverlaps(d, Timeline({{2.4, 2.6}}));
  EXPECT_EQ(out.SpeakerTimeline("B"), Timeline({{0, 1}, {2.4, 2.5}}));
  EXPECT_EQ(out.SpeakerTimeline("C"), Timeline({{2.5, 2.6}, {4, 5}}));
  EXPECT_EQ(out.SpeakerTimeline("A"), d.SpeakerTimeline("A"));
}

TEST(AssignOverlaps, AddsExactlyOneSpeakerNeverRemoves) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Annotation d = GenReference({3, 60.0, 0.0, 2.0, seed, "rec1"});
    const Annotation od = testing::RandomAnnotation(seed, 1, 8, 60.0, "ov");
    const Timeline overlap = od.Support();
    const Annotation out = AssignOverlaps(d, overlap);
    for (const auto& [label, track] : d.tracks()) {
      EXPECT_TRUE(track.Subtract(out.SpeakerTimeline(label)).empty());
    }
    // On overlap time that had exactly one speaker there are now exactly two.
    const Timeline single = d.Support().Subtract(d.OverlapSupport()).Intersect(overlap);
    EXPECT_NEAR(out.OverlapSupport().Intersect(single).Duration(), single.Duration(), 1e-6);
    std::vector<const Annotation*> ptrs = {&out};
    for (const MultiRegion& r : RegionizeMany(ptrs, {0, out.End()})) {
      EXPECT_LE(r.active[0].size(), 2u);
    }
  }
}

}  // namespace
}  // namespace dforge
