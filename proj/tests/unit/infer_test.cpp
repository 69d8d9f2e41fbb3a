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

#include <algorithm>
#include <filesystem>
#include <map>
#include <stdexcept>

#include "dforge/error.hpp"
#include "dforge/frames.hpp"
#include "dforge/infer.hpp"
#include "dforge/metrics.hpp"
#include "dforge/rttm.hpp"
#include "dforge/synth.hpp"
#include "test_support.hpp"

namespace dforge {
namespace {

using testing::MakeAnnotation;

MatrixPosteriorSource OracleSource(const Annotation& ref, double noise, std::uint64_t seed,
                                   int max_speakers = 5, double shift = 0.01) {
  MatrixPosteriorSource source({}, max_speakers);
  source.Add(GenPosteriors(ref, shift, noise, seed, FramesToCover(ref.End(), shift)));
  return source;
}

double Der(const Annotation& ref, const Annotation& hyp) {
  return *ComputeDer(ref, hyp.WithRecordingId(ref.recording_id())).der;
}

// The reference as seen on the decoder's frame grid.
Annotation Gridded(const Annotation& ref, double shift = 0.01) {
  return FromFrames(ToFrames(ref, shift, FramesToCover(ref.End(), shift)), ref.recording_id());
}

TEST(FilePosteriorSource, LoadsDirectory) {
  const auto dir = testing::TempDir("file_source");
  PosteriorMatrix m;
  m.recording_id = "recA";
  m.frame_shift = 0.1;
  m.speaker_ids = {"spk0", "spk1"};
  m.values.resize(2, 3);
  m.values << 0.9, 0.9, 0.1, 0.1, 0.3, 0.8;
  WriteTextFile((dir / "recA.post").string(), WritePosteriorsText(m));
  WriteTextFile((dir / "notes.txt").string(), "ignored");
  auto source = FilePosteriorSource(dir.string());
  EXPECT_EQ(source->recordings(), std::vector<std::string>{"recA"});
  EXPECT_EQ(source->num_frames("recA"), 3);
  EXPECT_NEAR(source->frame_shift("recA"), 0.1, 1e-12);

  DecodeRequest req{"recA", BinaryStream{"recA", 0.1, {0, 1, 1}}, 5, std::nullopt};
  const PosteriorMatrix out = source->Decode(req);
  EXPECT_EQ(out.num_frames(), 2);
  EXPECT_NEAR(out.values(1, 1), 0.8, 1e-9);
  req.k_max = 1;
  const PosteriorMatrix top = source->Decode(req);
  EXPECT_EQ(top.speaker_ids, std::vector<std::string>{"spk1"});

  req.k_max = 5;
  req.mask.values = {1, 1, 1};
  EXPECT_EQ(source->Decode(req).values, source->matrix("recA").values);

  req.mask.values = {1, 1};
  try {
    source->Decode(req);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGridMismatch);
  }
}

TEST(MatrixPosteriorSource, KeepsMostActiveRows) {
  PosteriorMatrix m;
  m.recording_id = "r";
  m.frame_shift = 0.1;
  m.speaker_ids = {"a", "b", "c", "d", "e"};
  m.values.resize(5, 2);
  m.values << 0.1, 0.1, 0.9, 0.8, 0.2, 0.2, 0.7, 0.9, 0.3, 0.0;
  MatrixPosteriorSource source({m});
  const PosteriorMatrix out = source.Decode({"r", BinaryStream{"r", 0.1, {1, 1}}, 2, std::nullopt});
  EXPECT_EQ(out.speaker_ids, (std::vector<std::string>{"b", "d"}));
}

TEST(FilePosteriorSource, Errors) {
  try {
    FilePosteriorSource("/nonexistent/dforge/dir");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFileNotFound);
  }
  const auto dir = testing::TempDir("file_source_bad");
  PosteriorMatrix m;
  m.recording_id = "other";
  m.speaker_ids = {"spk0"};
  m.values = Eigen::MatrixXd::Constant(1, 2, 0.5);
  WriteTextFile((dir / "recB.post").string(), WritePosteriorsText(m));
  try {
    FilePosteriorSource(dir.string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormatError);
  }
}

TEST(IterativeInference, RecoversSevenSpeakers) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Annotation ref = GenReference({7, 120.0, 0.0, 2.0, seed, "rec"});
    ASSERT_EQ(ref.NumSpeakers(), 7u);
    MatrixPosteriorSource source = OracleSource(ref, 0.0, seed);
    const IterativeResult r = IterativeInference(source, "rec", {5, 5, 0.5, 10});
    EXPECT_EQ(r.annotation.NumSpeakers(), 7u);
    ASSERT_GE(r.round_speakers.size(), 2u);
    EXPECT_EQ(r.round_speakers[0].size(), 5u);
    EXPECT_EQ(r.round_speakers[1].size(), 2u);
    EXPECT_LT(Der(Gridded(ref), r.annotation), 1e-9);
    EXPECT_LT(Der(ref, r.annotation), 0.02);
  }
}

TEST(IterativeInference, SingleSpeakerStopsAfterOneRound) {
  const Annotation ref = GenReference({1, 30.0, 0.0, 2.0, 3, "rec"});
  MatrixPosteriorSource source = OracleSource(ref, 0.0, 3);
  const IterativeResult r = IterativeInference(source, "rec", {5, 5, 0.5, 10});
  EXPECT_EQ(r.round_speakers.size(), 1u);
  EXPECT_EQ(r.annotation.NumSpeakers(), 1u);
  EXPECT_LT(Der(Gridded(ref), r.annotation), 1e-9);
}

TEST(IterativeInference, FullCoverageAndMaskProperties) {
  // Every frame active for six speakers: round one claims all frames.
  PosteriorMatrix m;
  m.recording_id = "rec";
  m.frame_shift = 0.1;
  for (int s = 0; s < 6; ++s) m.speaker_ids.push_back("spk" + std::to_string(s));
  m.values = Eigen::MatrixXd::Constant(6, 50, 0.9);
  MatrixPosteriorSource source({m}, 5);
  const IterativeResult r = IterativeInference(source, "rec", {5, 5, 0.5, 10});
  EXPECT_EQ(r.round_speakers.size(), 1u);
  EXPECT_EQ(r.annotation.NumSpeakers(), 5u);
}

TEST(IterativeInference, RoundsAreDisjointAndTerminate) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Annotation ref = GenReference({9, 90.0, 0.2, 2.0, seed, "rec"});
    MatrixPosteriorSource source = OracleSource(ref, 0.2, seed);
    const IterConfig cfg{2, 3, 0.5, 10};
    const IterativeResult r = IterativeInference(source, "rec", cfg);
    EXPECT_LE(r.round_speakers.size(), 10u);
    // Speakers from different rounds never share a frame.
    for (std::size_t a = 0; a < r.round_speakers.size(); ++a) {
      for (std::size_t b = a + 1; b < r.round_speakers.size(); ++b) {
        for (const auto& x : r.round_speakers[a]) {
          for (const auto& y : r.round_speakers[b]) {
            EXPECT_LT(r.annotation.SpeakerTimeline(x).Intersect(r.annotation.SpeakerTimeline(y)).Duration(),
                      1e-9);
          }
        }
      }
    }
  }
}

class ThrowingSource : public MatrixPosteriorSource {
 public:
  using MatrixPosteriorSource::MatrixPosteriorSource;
  PosteriorMatrix Decode(const DecodeRequest&) override { throw std::runtime_error("model crashed"); }
};

class WideSource : public MatrixPosteriorSource {
 public:
  using MatrixPosteriorSource::MatrixPosteriorSource;
  PosteriorMatrix Decode(const DecodeRequest& r) override {
    PosteriorMatrix m = MatrixPosteriorSource::Decode(r);
    m.values.array() += 0.5;
    return m;
  }
};

class ContiguousOnlySource : public MatrixPosteriorSource {
 public:
  using MatrixPosteriorSource::MatrixPosteriorSource;
  bool supports_masked_decoding() const override { return false; }
};

TEST(IterativeInference, SourceFailures) {
  const Annotation ref = GenReference({2, 20.0, 0.0, 2.0, 1, "rec"});
  const PosteriorMatrix post = GenPosteriors(ref, 0.01, 0.0, 1);
  ThrowingSource thrower({post});
  try {
    IterativeInference(thrower, "rec", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSourceFailure);
    EXPECT_NE(std::string(e.what()).find("model crashed"), std::string::npos);
  }
  WideSource wide({post});
  try {
    IterativeInference(wide, "rec", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSourceFailure);
  }
  MatrixPosteriorSource ok({post});
  try {
    IterativeInference(ok, "missing", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingRecording);
  }
  EXPECT_THROW(IterativeInference(ok, "rec", {3, 2, 0.5, 10}), Error);
}

TEST(IterativeInference, NonMaskedSourceRunsOnce) {
  const Annotation ref = GenReference({7, 60.0, 0.0, 2.0, 2, "rec"});
  ContiguousOnlySource source({GenPosteriors(ref, 0.01, 0.0, 2)}, 5);
  const IterativeResult r = IterativeInference(source, "rec", {});
  EXPECT_EQ(r.round_speakers.size(), 1u);
  EXPECT_EQ(r.annotation.NumSpeakers(), 5u);
}

TEST(MultiKEnsemble, MatchesOracleOnCleanInput) {
  const Annotation ref = GenReference({4, 60.0, 0.0, 2.0, 5, "rec"});
  MatrixPosteriorSource source = OracleSource(ref, 0.0, 5);
  const Annotation fused = MultiKEnsemble(source, "rec", {});
  EXPECT_LT(Der(Gridded(ref), fused), 1e-9);
  // Deterministic.
  EXPECT_EQ(MultiKEnsemble(source, "rec", {}), fused);
}

TEST(MultiKEnsemble, SevenSpeakerOracleNearBestSingleRun) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Annotation ref = GenReference({7, 120.0, 0.1, 2.0, seed, "rec"});
    MatrixPosteriorSource source = OracleSource(ref, 0.1, seed);
    double best = 1.0;
    for (int k = 1; k <= 5; ++k) {
      best = std::min(best, Der(ref, IterativeInference(source, "rec", {k, 5, 0.5, 10}).annotation));
    }
    EXPECT_LE(Der(ref, MultiKEnsemble(source, "rec", {})), best + 0.02) << "seed " << seed;
  }
}

// Returns the current activity it is asked to refine.
class IdentityPairSource : public MatrixPosteriorSource {
 public:
  using MatrixPosteriorSource::MatrixPosteriorSource;
  int max_speakers() const override { return 2; }
  PosteriorMatrix Decode(const DecodeRequest& r) override { return *r.prior; }
};

TEST(EendaspRefine, IdentitySourceIsFixedPoint) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Annotation in = testing::RandomAnnotation(seed, 4, 20, 30.0, "s", "rec");
    IdentityPairSource pair({GenPosteriors(in, 0.01, 0.0, 0, FramesToCover(in.End(), 0.01))});
    for (int rounds : {1, 3}) {
      EXPECT_EQ(WriteRttm(EendaspRefine(in, pair, {rounds, 0.5})), WriteRttm(in));
    }
  }
}

TEST(EendaspRefine, RecoversOverlapLostByClustering) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Annotation ref = GenReference({3, 60.0, 0.25, 2.5, seed, "rec"});
    // Clustering kept one speaker per overlapped region: drop the
    // lexicographically larger speaker wherever two talk at once.
    std::map<std::string, Timeline> tracks = ref.tracks();
    const auto labels = ref.Speakers();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const Timeline shared = ref.SpeakerTimeline(labels[i]).Intersect(ref.SpeakerTimeline(labels[j]));
        tracks[labels[i]] = tracks[labels[i]].Subtract(shared);
      }
    }
    const Annotation merged = Annotation::FromTracks("rec", tracks);
    MatrixPosteriorSource pair = OracleSource(ref, 0.0, seed, 2);
    const Annotation out = EendaspRefine(merged, pair);
    EXPECT_LT(Der(ref, out), Der(ref, merged)) << "seed " << seed;
  }
}

TEST(EendaspRefine, IdentityWhenAlreadyCorrect) {
  const Annotation ref = GenReference({3, 60.0, 0.2, 2.0, 8, "rec"});
  MatrixPosteriorSource pair = OracleSource(ref, 0.0, 8, 2);
  // Labels from the frame grid so edits are exact.
  const Annotation gridded = FromFrames(ToFrames(ref, 0.01, FramesToCover(ref.End(), 0.01)), "rec");
  const Annotation out = EendaspRefine(gridded, pair);
  EXPECT_LT(Der(gridded, out), 1e-6);
  EXPECT_EQ(out.Speakers(), gridded.Speakers());
}

TEST(EendaspRefine, SingleSpeakerUnchanged) {
  const Annotation one = MakeAnnotation({{"A", 0, 5}}, "rec");
  MatrixPosteriorSource pair = OracleSource(one, 0.0, 1, 2);
  EXPECT_EQ(EendaspRefine(one, pair), one);
  const Annotation two = MakeAnnotation({{"A", 0, 5}, {"B", 5, 6}}, "rec");
  EXPECT_EQ(EendaspRefine(two, pair, {0, 0.5}), two);
}

TEST(EendaspRefine, ReducesDerOfCorruptedInput) {
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Annotation ref = GenReference({3, 90.0, 0.2, 2.5, seed, "rec"});
    // Boundary jitter only: labels keep their identity.
    const Annotation initial = Corrupt(ref, {0.3, 0.0, 0.0, 0.0, seed + 100});
    MatrixPosteriorSource pair = OracleSource(ref, 0.1, seed, 2);
    const Annotation out = EendaspRefine(initial, pair);
    const double before = Der(ref, initial);
    const double after = Der(ref, out);
    EXPECT_LE(after, before + 1e-9) << "seed " << seed;
    if (after < before - 1e-3) ++improved;
  }
  EXPECT_GE(improved, 8);
}

}  // namespace
}  // namespace dforge
