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

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dforge/vbx.hpp"

namespace dforge {

// Exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUndefined = 1;  // scoring undefined (no reference speech)
inline constexpr int kExitInputError = 2;

// Output paths of "-" or "" mean standard output.

struct ScoreArgs {
  std::string ref;
  std::string hyp;
  std::string uem;
  double collar = 0.0;
};

struct CombineArgs {
  std::vector<std::string> inputs;
  std::vector<double> weights;
  std::string tie_rule = "modified";
  double exponent = 1.0;
  std::string output;
};

struct VbxArgs {
  std::string embeddings_dir;  // <rec>.emb files
  std::string plda;
  std::string plda2;
  double alpha = 0.5;
  std::string transform;
  double ahc_threshold = 0.0;
  VbxParams params;
  // Turns of this RTTM mark detected overlap regions.
  std::string overlap_rttm;
  std::string output;
  int threads = 0;
};

struct PostprocessArgs {
  std::string diar;
  std::vector<std::string> vad_dirs;  // <rec>.post files, averaged
  std::string post_dir;               // <rec>.post speaker posteriors
  double threshold = 0.5;
  int median = 11;
  bool filter = true;
  bool recover = true;
  // Rename posterior rows after the best-matching diarization speakers.
  bool align_rows = false;
  std::string output;
};

struct IterateArgs {
  std::string source_dir;  // <rec>.post files
  int k_first = 5;
  int k_later = 5;
  double threshold = 0.5;
  int max_rounds = 10;
  int max_speakers = 5;
  bool ensemble = false;
  std::string output;
  int threads = 0;
};

struct SynthArgs {
  int speakers = 2;
  double duration = 60.0;
  double overlap = 0.0;
  double mean_turn = 2.5;
  std::uint64_t seed = 0;
  std::string recording_id = "synth";
  std::string output;
  // Optional companions of the reference.
  std::string hyp_output;
  double jitter = 0.0;
  double deletion = 0.0;
  double insertion = 0.0;
  double confusion = 0.0;
  std::uint64_t hyp_seed = 1;
  std::string posteriors_output;
  double noise = 0.0;
  double frame_shift = 0.01;
  std::string embeddings_output;
  std::string plda_output;
  int plda_dim = 16;
  double separation = 25.0;
  double window = 1.5;
  double hop = 0.25;
};

struct PipelineArgs {
  std::string config;
  int threads = 0;
  std::string output;  // overrides [pipeline] output
  std::string report;  // overrides [pipeline] report
};

// Each command reports errors on `err` and returns an exit status.
int CmdScore(const ScoreArgs& args, std::ostream& out, std::ostream& err);
int CmdCombine(const CombineArgs& args, std::ostream& out, std::ostream& err);
int CmdVbx(const VbxArgs& args, std::ostream& out, std::ostream& err);
int CmdPostprocess(const PostprocessArgs& args, std::ostream& out, std::ostream& err);
int CmdIterate(const IterateArgs& args, std::ostream& out, std::ostream& err);
int CmdSynth(const SynthArgs& args, std::ostream& out, std::ostream& err);
int CmdPipeline(const PipelineArgs& args, std::ostream& out, std::ostream& err);

}  // namespace dforge
