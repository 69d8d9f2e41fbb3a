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

// dforge: command-line front end of the diarize-forge library.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dforge/commands.hpp"

namespace {

void AddVbxParams(CLI::App* cmd, dforge::VbxParams& p) {
  cmd->add_option("--p-loop", p.p_loop, "HMM self-loop probability")->capture_default_str();
  cmd->add_option("--fa", p.fa, "acoustic scaling factor")->capture_default_str();
  cmd->add_option("--fb", p.fb, "speaker regularisation factor")->capture_default_str();
  cmd->add_option("--max-iters", p.max_iters)->capture_default_str();
  cmd->add_option("--elbo-tol", p.elbo_tol, "relative ELBO change for convergence")
      ->capture_default_str();
  cmd->add_option("--min-occupancy", p.min_occupancy,
                  "drop speakers below this share of windows")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diarize-forge: diarization scoring, fusion, clustering and post-processing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dforge 0.1.0");
  int status = dforge::kExitOk;
  auto& out = std::cout;
  auto& err = std::cerr;

  dforge::ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "DER/JER of a hypothesis against a reference");
  score_cmd->add_option("ref", score.ref, "reference RTTM")->required();
  score_cmd->add_option("hyp", score.hyp, "hypothesis RTTM")->required();
  score_cmd->add_option("--uem", score.uem, "UEM file restricting the scored regions");
  score_cmd->add_option("--collar", score.collar, "seconds excluded around reference boundaries")
      ->capture_default_str();
  score_cmd->callback([&] { status = dforge::CmdScore(score, out, err); });

  dforge::CombineArgs combine;
  auto* combine_cmd = app.add_subcommand("combine", "fuse hypotheses with DOVER-Lap voting");
  combine_cmd->add_option("inputs", combine.inputs, "hypothesis RTTM files")->required();
  combine_cmd->add_option("--weights", combine.weights, "manual weight per input")->delimiter(',');
  combine_cmd->add_option("--tie-rule", combine.tie_rule, "modified or original")
      ->check(CLI::IsMember({"modified", "original"}))
      ->capture_default_str();
  combine_cmd->add_option("--exponent", combine.exponent, "rank weighting exponent")
      ->capture_default_str();
  combine_cmd->add_option("-o,--output", combine.output, "output RTTM (default stdout)");
  combine_cmd->callback([&] { status = dforge::CmdCombine(combine, out, err); });

  dforge::VbxArgs vbx;
  auto* vbx_cmd = app.add_subcommand("vbx", "AHC + VBx clustering of x-vector sequences");
  vbx_cmd->add_option("embeddings", vbx.embeddings_dir, "directory of <rec>.emb files")->required();
  vbx_cmd->add_option("--plda", vbx.plda, "PLDA model")->required();
  vbx_cmd->add_option("--plda2", vbx.plda2, "second PLDA, interpolated with --alpha");
  vbx_cmd->add_option("--alpha", vbx.alpha, "weight of --plda in the interpolation")
      ->capture_default_str();
  vbx_cmd->add_option("--transform", vbx.transform, "TRANSFORM file applied before clustering");
  vbx_cmd->add_option("--ahc-threshold", vbx.ahc_threshold, "PLDA LLR stopping threshold")
      ->capture_default_str();
  AddVbxParams(vbx_cmd, vbx.params);
  vbx_cmd->add_option("--overlap-rttm", vbx.overlap_rttm, "detected overlap regions");
  vbx_cmd->add_option("-o,--output", vbx.output, "output RTTM (default stdout)");
  vbx_cmd->add_option("--threads", vbx.threads, "worker count");
  vbx_cmd->callback([&] { status = dforge::CmdVbx(vbx, out, err); });

  dforge::PostprocessArgs post;
  auto* post_cmd = app.add_subcommand("postprocess", "VAD-based false-alarm filter and missed-speech recovery");
  post_cmd->add_option("diar", post.diar, "diarization RTTM")->required();
  post_cmd->add_option("--vad-dir", post.vad_dirs, "directory of <rec>.post VAD posteriors (repeatable)")
      ->required();
  post_cmd->add_option("--post-dir", post.post_dir, "directory of <rec>.post speaker posteriors");
  post_cmd->add_option("--threshold", post.threshold)->capture_default_str();
  post_cmd->add_option("--median", post.median, "odd median filter length in frames")
      ->capture_default_str();
  post_cmd->add_flag("!--no-filter", post.filter, "skip false-alarm filtering");
  post_cmd->add_flag("!--no-recover", post.recover, "skip missed-speech recovery");
  post_cmd->add_flag("--align-rows", post.align_rows,
                     "rename posterior rows after the best-matching diarization speakers");
  post_cmd->add_option("-o,--output", post.output, "output RTTM (default stdout)");
  post_cmd->callback([&] { status = dforge::CmdPostprocess(post, out, err); });

  dforge::IterateArgs iter;
  auto* iter_cmd = app.add_subcommand("iterate", "iterative inference over stored posteriors");
  iter_cmd->add_option("--source", iter.source_dir, "directory of <rec>.post files")->required();
  iter_cmd->add_option("--k-first", iter.k_first, "speakers decoded in the first round")
      ->check(CLI::Range(1, 5))
      ->capture_default_str();
  iter_cmd->add_option("--k-later", iter.k_later)->capture_default_str();
  iter_cmd->add_option("--threshold", iter.threshold)->capture_default_str();
  iter_cmd->add_option("--max-rounds", iter.max_rounds)->capture_default_str();
  iter_cmd->add_option("--max-speakers", iter.max_speakers, "source decoding capacity")
      ->capture_default_str();
  iter_cmd->add_flag("--ensemble", iter.ensemble, "fuse runs with k-first 1..5");
  iter_cmd->add_option("-o,--output", iter.output, "output RTTM (default stdout)");
  iter_cmd->add_option("--threads", iter.threads, "worker count");
  iter_cmd->callback([&] { status = dforge::CmdIterate(iter, out, err); });

  dforge::SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a seeded synthetic scenario");
  synth_cmd->add_option("--speakers", synth.speakers)->capture_default_str();
  synth_cmd->add_option("--duration", synth.duration, "seconds")->capture_default_str();
  synth_cmd->add_option("--overlap", synth.overlap, "target overlap ratio")->capture_default_str();
  synth_cmd->add_option("--mean-turn", synth.mean_turn, "seconds")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--recording", synth.recording_id)->capture_default_str();
  synth_cmd->add_option("-o,--output", synth.output, "reference RTTM (default stdout)");
  synth_cmd->add_option("--hyp-output", synth.hyp_output, "corrupted hypothesis RTTM");
  synth_cmd->add_option("--jitter", synth.jitter, "boundary jitter std (s)");
  synth_cmd->add_option("--deletion", synth.deletion, "turn deletion rate");
  synth_cmd->add_option("--insertion", synth.insertion, "turn insertion rate");
  synth_cmd->add_option("--confusion", synth.confusion, "speaker confusion rate");
  synth_cmd->add_option("--hyp-seed", synth.hyp_seed, "seed of the corruption")->capture_default_str();
  synth_cmd->add_option("--posteriors-output", synth.posteriors_output, "oracle POST file");
  synth_cmd->add_option("--noise", synth.noise, "posterior noise std");
  synth_cmd->add_option("--frame-shift", synth.frame_shift)->capture_default_str();
  synth_cmd->add_option("--embeddings-output", synth.embeddings_output, "ARK2 embedding file");
  synth_cmd->add_option("--plda-output", synth.plda_output, "generating PLDA model");
  synth_cmd->add_option("--plda-dim", synth.plda_dim)->capture_default_str();
  synth_cmd->add_option("--separation", synth.separation, "between/within trace ratio")
      ->capture_default_str();
  synth_cmd->add_option("--window", synth.window)->capture_default_str();
  synth_cmd->add_option("--hop", synth.hop)->capture_default_str();
  synth_cmd->callback([&] { status = dforge::CmdSynth(synth, out, err); });

  dforge::PipelineArgs pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "run a configured stage graph");
  pipe_cmd->add_option("config", pipe.config, "pipeline configuration file")->required();
  pipe_cmd->add_option("--threads", pipe.threads, "worker count");
  pipe_cmd->add_option("-o,--output", pipe.output, "override the configured output RTTM");
  pipe_cmd->add_option("--report", pipe.report, "override the configured report path");
  pipe_cmd->callback([&] { status = dforge::CmdPipeline(pipe, out, err); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? dforge::kExitOk : dforge::kExitInputError;
  }
  return status;
}
