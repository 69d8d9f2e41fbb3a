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

#include "dforge/config.hpp"
#include "dforge/error.hpp"
#include "dforge/matrix_io.hpp"
#include "dforge/posteriors.hpp"
#include "dforge/synth.hpp"

namespace dforge {
namespace {

template <typename F>
void ExpectLineError(F&& f, ErrorCode code, std::size_t line) {
  try {
    f();
    FAIL() << "no error";
  } catch (const LineError& e) {
    EXPECT_EQ(e.code(), code) << e.what();
    EXPECT_EQ(e.line(), line) << e.what();
  }
}

EmbeddingSequence SmallSequence() {
  EmbeddingSequence seq;
  seq.recording_id = "rec";
  seq.window = 1.5;
  seq.hop = 0.25;
  seq.vectors.resize(3, 2);
  seq.vectors << 0.5, -1.25, 2.0, 3.0, 0.125, 4.0;
  for (int t = 0; t < 3; ++t) seq.windows.push_back({0.25 * t, 0.25 * t + 1.5});
  return seq;
}

TEST(EmbeddingIo, TextRoundTrip) {
  const EmbeddingSequence seq = SmallSequence();
  const std::string text = WriteEmbeddingsText(seq);
  EXPECT_EQ(text.substr(0, text.find('\n')), "ARK2 rec 3 2 1.5 0.25");
  const EmbeddingSequence back = ParseEmbeddings(text);
  EXPECT_EQ(back.recording_id, "rec");
  EXPECT_EQ(back.vectors, seq.vectors);
  EXPECT_EQ(back.windows, seq.windows);
}

TEST(EmbeddingIo, ExplicitWindowsRoundTrip) {
  EmbeddingSequence seq = SmallSequence();
  seq.windows[2] = {2.0, 3.0};
  const EmbeddingSequence back = ParseEmbeddings(WriteEmbeddingsText(seq));
  EXPECT_EQ(back.windows, seq.windows);
  EXPECT_THROW(WriteEmbeddingsBinary(seq), Error);
}

TEST(EmbeddingIo, BinaryRoundTrip) {
  const EmbeddingSequence seq = SmallSequence();
  const EmbeddingSequence back = ParseEmbeddings(WriteEmbeddingsBinary(seq));
  EXPECT_EQ(back.vectors, seq.vectors);  // all values exact in float32
  EXPECT_EQ(back.windows, seq.windows);
}

TEST(EmbeddingIo, Errors) {
  ExpectLineError([] { ParseEmbeddings("ARK rec 1 2 1.5 0.25\n1 2\n"); }, ErrorCode::kFormatError, 1);
  EXPECT_THROW(ParseEmbeddings("ARK2 rec 2 2 1.5 0.25\n1 2\n"), Error);
  EXPECT_THROW(ParseEmbeddings(""), Error);
}

TEST(PosteriorIo, TextAndBinaryRoundTrip) {
  PosteriorMatrix m;
  m.recording_id = "r1";
  m.frame_shift = 0.01;
  m.speaker_ids = {"spk0", "spk1"};
  m.values.resize(2, 3);
  m.values << 0.0, 0.25, 1.0, 0.5, 0.75, 0.125;
  const PosteriorMatrix t = ParsePosteriors(WritePosteriorsText(m));
  EXPECT_EQ(t.values, m.values);
  EXPECT_EQ(t.speaker_ids, m.speaker_ids);
  EXPECT_DOUBLE_EQ(t.frame_shift, 0.01);
  const PosteriorMatrix b = ParsePosteriors(WritePosteriorsBinary(m));
  EXPECT_EQ(b.values, m.values);
  EXPECT_EQ(ParsePosteriors(WritePosteriorsText(m), "row").speaker_ids[1], "row1");
}

TEST(PosteriorIo, Errors) {
  ExpectLineError([] { ParsePosteriors("POS r 1 2 0.01\n0 1\n"); }, ErrorCode::kFormatError, 1);
  try {
    ParsePosteriors("POST r 1 2 0.01\n0 1.5\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormatError);
  }
  EXPECT_THROW(ParsePosteriors("POST r 2 2 0.01\n0 1\n"), Error);
}

TEST(PldaIo, RoundTripIsExact) {
  const PldaModel m = RandomPlda(5, 3.0, 7);
  const PldaModel back = ParsePlda(WritePlda(m));
  EXPECT_EQ(back.mean, m.mean);
  EXPECT_EQ(back.between_class, m.between_class);
  EXPECT_EQ(back.within_class, m.within_class);
}

TEST(PldaIo, Errors) {
  ExpectLineError([] { ParsePlda("PLDA 2\nMEAN\n0 0\nBETWEEN\n1 0\n0 1\nWITHIN\n1 0\n"); },
                  ErrorCode::kFormatError, 8);
  ExpectLineError([] { ParsePlda("PLDA 2\nMEAN\n0 x\n"); }, ErrorCode::kFormatError, 3);
  ExpectLineError([] { ParsePlda("PLDA 2\nAVG\n"); }, ErrorCode::kFormatError, 2);
  try {
    // Asymmetric within-class matrix.
    ParsePlda("PLDA 2\nMEAN\n0 0\nBETWEEN\n1 0\n0 1\nWITHIN\n1 0.5\n0 1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormatError);
  }
}

TEST(TransformIo, RoundTrip) {
  Preprocessor pre;
  pre.center = Eigen::Vector3d(1.0, -2.0, 0.5);
  pre.whitener = Eigen::Matrix3d::Identity() * 2.0;
  pre.lda_projection = Eigen::MatrixXd::Zero(2, 3);
  pre.lda_projection(0, 0) = 1.0;
  pre.lda_projection(1, 2) = -1.0;
  const Preprocessor back = ParsePreprocessor(WritePreprocessor(pre));
  EXPECT_EQ(back.center, pre.center);
  EXPECT_EQ(back.whitener, pre.whitener);
  EXPECT_EQ(back.lda_projection, pre.lda_projection);
  ExpectLineError([] { ParsePreprocessor("TRANSFORM 2\n"); }, ErrorCode::kFormatError, 1);
}

TEST(Config, ParsesSectionsAndTypes) {
  const Config c = ParseConfig(
      "# comment\n"
      "version = 1\n"
      "\n"
      "[pipeline]\n"
      "threads = 4   \n"
      "; another comment\n"
      "output = out.rttm\n"
      "[stage.a]\n"
      "weights = 1, 2.5,3\n"
      "flag = true\n");
  EXPECT_EQ(c.version, 1);
  ASSERT_EQ(c.sections.size(), 2u);
  const ConfigSection* p = c.Find("pipeline");
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->GetInt("threads"), 4);
  EXPECT_EQ(p->GetString("output"), "out.rttm");
  EXPECT_EQ(p->GetString("missing", "dflt"), "dflt");
  const ConfigSection* a = c.Find("stage.a");
  EXPECT_EQ(a->GetDoubleList("weights"), (std::vector<double>{1.0, 2.5, 3.0}));
  EXPECT_TRUE(a->GetBool("flag", false));
  EXPECT_EQ(c.Find("nope"), nullptr);
}

TEST(Config, ErrorsCarryLineNumbers) {
  ExpectLineError([] { ParseConfig("[pipeline]\nthreads = 1\n"); }, ErrorCode::kConfigError, 1);
  ExpectLineError([] { ParseConfig("version = 2\n"); }, ErrorCode::kConfigError, 1);
  ExpectLineError([] { ParseConfig("version = 1\nbogus = 3\n"); }, ErrorCode::kConfigError, 2);
  ExpectLineError([] { ParseConfig("version = 1\n[a\n"); }, ErrorCode::kConfigError, 2);
  ExpectLineError([] { ParseConfig("version = 1\n[a]\n[a]\n"); }, ErrorCode::kConfigError, 3);
  ExpectLineError([] { ParseConfig("version = 1\n[a]\nno equals\n"); }, ErrorCode::kConfigError, 3);
  ExpectLineError([] { ParseConfig("version = 1\n[a]\nx = 1\nx = 2\n"); }, ErrorCode::kConfigError, 4);

  const Config c = ParseConfig("version = 1\n[s]\nn = abc\nr = 7\nextra = 1\n");
  const ConfigSection& s = *c.Find("s");
  ExpectLineError([&] { s.GetInt("n"); }, ErrorCode::kConfigError, 3);
  ExpectLineError([&] { s.GetInt("r", std::nullopt, 0, 5); }, ErrorCode::kConfigError, 4);
  ExpectLineError([&] { s.GetString("absent"); }, ErrorCode::kConfigError, 2);
}

TEST(Config, RejectUnknownNamesField) {
  const Config c = ParseConfig("version = 1\n[s]\nused = 1\nstray = 2\n");
  const ConfigSection& s = *c.Find("s");
  s.GetInt("used");
  try {
    s.RejectUnknown();
    FAIL();
  } catch (const LineError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("stray"), std::string::npos);
  }
}

}  // namespace
}  // namespace dforge
