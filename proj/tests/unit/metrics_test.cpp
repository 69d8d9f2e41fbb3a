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

#include <map>

#include "dforge/assignment.hpp"
#include "dforge/metrics.hpp"
#include "dforge/rng.hpp"
#include "test_support.hpp"

namespace dforge {
namespace {

using testing::MakeAnnotation;
using testing::RandomAnnotation;

TEST(OverlapMatrix, Examples) {
  EXPECT_DOUBLE_EQ(
      ComputeOverlapMatrix(MakeAnnotation({{"A", 0, 10}}), MakeAnnotation({{"X", 0, 8}})).values(0, 0),
      8.0);
  const auto m = ComputeOverlapMatrix(MakeAnnotation({{"A", 0, 5}, {"B", 5, 10}}),
                                      MakeAnnotation({{"X", 0, 6}, {"Y", 6, 10}}));
  Eigen::MatrixXd expected(2, 2);
  expected << 5, 0, 1, 4;
  EXPECT_TRUE(m.values.isApprox(expected));
  EXPECT_TRUE(ComputeOverlapMatrix(MakeAnnotation({{"A", 0, 1}}), MakeAnnotation({{"X", 2, 3}}))
                  .values.isZero());
}

TEST(Assignment, Examples) {
  Eigen::MatrixXd m(2, 2);
  m << 5, 1, 2, 4;
  EXPECT_EQ(SolveMaxAssignment(m), (std::vector<int>{0, 1}));
  Eigen::MatrixXd row(1, 3);
  row << 3, 7, 2;
  EXPECT_EQ(SolveMaxAssignment(row), (std::vector<int>{1}));
  EXPECT_EQ(SolveMaxAssignment(Eigen::MatrixXd::Identity(4, 4)), (std::vector<int>{0, 1, 2, 3}));
}

TEST(Assignment, MatchesExhaustiveSearch) {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const auto r = static_cast<Eigen::Index>(1 + rng.UniformInt(6));
    const auto c = static_cast<Eigen::Index>(1 + rng.UniformInt(6));
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j)
        m(i, j) = rng.Bernoulli(0.3) ? 0.0 : static_cast<double>(rng.UniformInt(5));
    EXPECT_NEAR(MaxAssignmentValue(m), testing::BruteForceMaxAssignment(m), 1e-9);
  }
}

TEST(Mapping, NeverMapsDisjointSpeakers) {
  const auto m = OptimalMapping(
      ComputeOverlapMatrix(MakeAnnotation({{"A", 0, 1}}), MakeAnnotation({{"X", 2, 3}})));
  EXPECT_TRUE(m.hyp_to_ref.empty());
}

TEST(Mapping, TieBreaksLexicographically) {
  // A and B overlap X and Y equally: the smaller labels pair up.
  const auto m = OptimalMapping(ComputeOverlapMatrix(
      MakeAnnotation({{"A", 0, 2}, {"B", 0, 2}}), MakeAnnotation({{"X", 0, 2}, {"Y", 0, 2}})));
  EXPECT_EQ(m.hyp_to_ref.at("X"), "A");
  EXPECT_EQ(m.hyp_to_ref.at("Y"), "B");
}

TEST(Der, SingleSpeaker) {
  const auto d = ComputeDer(MakeAnnotation({{"A", 0, 10}}), MakeAnnotation({{"X", 0, 8}}));
  EXPECT_DOUBLE_EQ(d.missed, 2.0);
  EXPECT_DOUBLE_EQ(d.false_alarm, 0.0);
  EXPECT_DOUBLE_EQ(d.confusion, 0.0);
  EXPECT_NEAR(*d.der, 0.2, 1e-12);
}

TEST(Der, OverlapIsScored) {
  const auto d = ComputeDer(MakeAnnotation({{"A", 0, 10}, {"B", 4, 6}}), MakeAnnotation({{"X", 0, 10}}));
  EXPECT_DOUBLE_EQ(d.missed, 2.0);
  EXPECT_DOUBLE_EQ(d.total_ref_speech, 12.0);
  EXPECT_NEAR(*d.der, 2.0 / 12.0, 1e-12);
}

TEST(Der, EmptyReferenceIsUndefined) {
  const auto d = ComputeDer(Annotation("rec1"), MakeAnnotation({{"X", 0, 1}}));
  EXPECT_FALSE(d.der.has_value());
  EXPECT_DOUBLE_EQ(d.false_alarm, 1.0);
  EXPECT_FALSE(ComputeJer(Annotation("rec1"), MakeAnnotation({{"X", 0, 1}})).has_value());
}

TEST(Der, MatchesFrameOracle) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const Annotation ref = RandomAnnotation(seed, 4, 12, 10.0, "r");
    const Annotation hyp = RandomAnnotation(seed + 7777, 5, 12, 10.0, "h");
    const auto d = ComputeDer(ref, hyp);
    const auto [mi, fa, cf, total] = testing::FrameDerOracle(ref, hyp);
    EXPECT_NEAR(d.missed, mi, 1e-6) << seed;
    EXPECT_NEAR(d.false_alarm, fa, 1e-6) << seed;
    EXPECT_NEAR(d.confusion, cf, 1e-6) << seed;
    EXPECT_NEAR(d.total_ref_speech, total, 1e-6) << seed;
  }
}

TEST(Der, IdentityAndRenamingInvariance) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Annotation ref = RandomAnnotation(seed, 4, 20);
    const Annotation hyp = RandomAnnotation(seed + 99, 4, 20);
    EXPECT_EQ(*ComputeDer(ref, ref).der, 0.0);
    EXPECT_EQ(*ComputeJer(ref, ref), 0.0);
    std::map<std::string, std::string> rename;
    for (const auto& s : hyp.Speakers()) rename[s] = "zz_" + s;
    const auto d1 = ComputeDer(ref, hyp);
    const auto d2 = ComputeDer(ref, hyp.Relabeled(rename));
    EXPECT_NEAR(*d1.der, *d2.der, 1e-12);
    EXPECT_NEAR(*ComputeJer(ref, hyp), *ComputeJer(ref, hyp.Relabeled(rename)), 1e-12);
    EXPECT_NEAR(d1.errors(), d1.missed + d1.false_alarm + d1.confusion, 0.0);
    EXPECT_GE(d1.missed, 0.0);
    EXPECT_GE(d1.false_alarm, 0.0);
    EXPECT_GE(d1.confusion, 0.0);
  }
}

TEST(Der, CollarNeverAddsReferenceSpeech) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Annotation ref = RandomAnnotation(seed, 3, 10);
    const Annotation hyp = RandomAnnotation(seed + 3, 3, 10);
    double previous = 1e300;
    for (double collar : {0.0, 0.1, 0.25, 0.5, 1.0}) {
      const double total = ComputeDer(ref, hyp, {collar, nullptr}).total_ref_speech;
      EXPECT_LE(total, previous + 1e-9);
      previous = total;
    }
  }
}

TEST(Der, CollarExcisesBoundaries) {
  const auto d = ComputeDer(MakeAnnotation({{"A", 0, 10}}), MakeAnnotation({{"X", 0, 9}}), {0.5, nullptr});
  // Scored: [0.5, 9.5); the miss on [9, 9.5) remains.
  EXPECT_NEAR(d.total_ref_speech, 9.0, 1e-9);
  EXPECT_NEAR(d.missed, 0.5, 1e-9);
}

TEST(Der, UemRestrictsScoring) {
  Uem uem{{"rec1", Timeline({{0, 5}})}};
  const auto d = ComputeDer(MakeAnnotation({{"A", 0, 10}}), MakeAnnotation({{"X", 0, 8}}), {0.0, &uem});
  EXPECT_DOUBLE_EQ(d.total_ref_speech, 5.0);
  EXPECT_DOUBLE_EQ(*d.der, 0.0);
}

TEST(Jer, Examples) {
  EXPECT_NEAR(*ComputeJer(MakeAnnotation({{"A", 0, 10}}), MakeAnnotation({{"X", 0, 8}})), 0.2, 1e-12);
  EXPECT_DOUBLE_EQ(*ComputeJer(MakeAnnotation({{"A", 0, 10}}), Annotation("rec1")), 1.0);
  // Two speakers: A matched perfectly, B unmapped -> mean(0, 1).
  EXPECT_DOUBLE_EQ(
      *ComputeJer(MakeAnnotation({{"A", 0, 5}, {"B", 5, 10}}), MakeAnnotation({{"X", 0, 5}})), 0.5);
}

TEST(Aggregate, PoolsDerAndAveragesJer) {
  std::vector<RecordingScore> scores;
  scores.push_back(ScoreRecording(MakeAnnotation({{"A", 0, 10}}, "r1"), MakeAnnotation({{"X", 0, 8}}, "r1")));
  scores.push_back(ScoreRecording(MakeAnnotation({{"A", 0, 30}}, "r2"), MakeAnnotation({{"X", 0, 30}}, "r2")));
  const CorpusScore c = AggregateScores(scores);
  EXPECT_NEAR(*c.der.der, 2.0 / 40.0, 1e-12);
  EXPECT_NEAR(*c.jer, 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(c.der.missed, 2.0);
}

}  // namespace
}  // namespace dforge
