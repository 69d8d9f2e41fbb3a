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

#include "dforge/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>

#include "dforge/error.hpp"
#include "dforge/fusion.hpp"
#include "dforge/infer.hpp"
#include "dforge/matrix_io.hpp"
#include "dforge/metrics.hpp"
#include "dforge/pipeline.hpp"
#include "dforge/rttm.hpp"
#include "dforge/stream_post.hpp"
#include "dforge/synth.hpp"

namespace dforge {

namespace fs = std::filesystem;

namespace {

int Guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInputError;
}

void Emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    WriteTextFile(path, text);
  }
}

std::map<std::string, Annotation> ByRecording(std::vector<Annotation> annotations) {
  std::map<std::string, Annotation> out;
  for (Annotation& a : annotations) {
    std::string id = a.recording_id();
    out.emplace(std::move(id), std::move(a));
  }
  return out;
}

std::vector<std::string> FilesWithExtension(const std::string& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kFileNotFound, "'" + dir + "' is not a directory");
  }
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      out.push_back(entry.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

PosteriorMatrix LoadPosteriors(const std::string& dir, const std::string& recording_id) {
  const fs::path p = fs::path(dir) / (recording_id + ".post");
  if (!fs::is_regular_file(p)) {
    throw Error(ErrorCode::kMissingRecording, "'" + p.string() + "' not found");
  }
  return ParsePosteriors(ReadTextFile(p.string()));
}

std::string Cell(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string Percent(const std::optional<double>& v) {
  return v ? Cell("%8.2f", 100.0 * *v) : std::string("     n/a");
}

std::string ScoreLine(const std::string& name, std::size_t width, const DerBreakdown& d,
                      const std::optional<double>& jer) {
  std::string line = name;
  line.resize(std::max(width, name.size()), ' ');
  line += Cell(" %10.3f", d.missed) + Cell(" %10.3f", d.false_alarm) +
          Cell(" %10.3f", d.confusion) + Cell(" %10.3f", d.total_ref_speech) + ' ' +
          Percent(d.der) + ' ' + Percent(jer) + '\n';
  return line;
}

}  // namespace

int CmdScore(const ScoreArgs& args, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    const auto refs = ByRecording(ReadRttmFile(args.ref));
    const auto hyps = ByRecording(ReadRttmFile(args.hyp));
    Uem uem;
    if (!args.uem.empty()) uem = ReadUemFile(args.uem);
    const ScoringOptions options{args.collar, args.uem.empty() ? nullptr : &uem};

    std::vector<RecordingScore> scores;
    for (const auto& [rec, ref] : refs) {
      auto it = hyps.find(rec);
      if (it == hyps.end()) {
        err << "warning: recording '" << rec << "' missing from hypothesis; scored as missed\n";
        scores.push_back(ScoreRecording(ref, Annotation(rec), options));
      } else {
        scores.push_back(ScoreRecording(ref, it->second, options));
      }
    }
    for (const auto& [rec, hyp] : hyps) {
      if (!refs.count(rec)) err << "warning: recording '" << rec << "' not in reference; ignored\n";
    }
    const CorpusScore total = AggregateScores(scores);

    std::size_t width = 16;
    for (const RecordingScore& s : scores) width = std::max(width, s.recording_id.size() + 1);
    std::string header = "recording";
    header.resize(width, ' ');
    out << header << "      MI(s)      FA(s)      CF(s)     ref(s)   DER(%)   JER(%)\n";
    for (const RecordingScore& s : scores) out << ScoreLine(s.recording_id, width, s.der, s.jer);
    out << ScoreLine("*** OVERALL ***", width, total.der, total.jer);
    if (!total.der.der) {
      err << "error: reference holds no speech; DER is undefined\n";
      return kExitUndefined;
    }
    return kExitOk;
  });
}

int CmdCombine(const CombineArgs& args, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    if (args.inputs.empty()) throw Error(ErrorCode::kInvalidArgument, "no input files");
    if (!args.weights.empty() && args.weights.size() != args.inputs.size()) {
      throw Error(ErrorCode::kWeightCountMismatch, std::to_string(args.weights.size()) +
                                                       " weights for " +
                                                       std::to_string(args.inputs.size()) + " inputs");
    }
    FusionOptions options;
    options.rank_exponent = args.exponent;
    options.tie_rule = ParseTieRule(args.tie_rule);

    std::vector<std::map<std::string, Annotation>> files;
    std::set<std::string> recordings;
    for (const std::string& path : args.inputs) {
      files.push_back(ByRecording(ReadRttmFile(path)));
      for (const auto& entry : files.back()) recordings.insert(entry.first);
    }
    std::vector<Annotation> combined;
    for (const std::string& rec : recordings) {
      HypothesisSet set;
      set.manual_weights = args.weights;
      for (const auto& file : files) {
        auto it = file.find(rec);
        set.hypotheses.push_back(it == file.end() ? Annotation(rec) : it->second);
      }
      combined.push_back(Combine(set, options));
    }
    Emit(args.output, WriteRttm(combined), out);
    return kExitOk;
  });
}

int CmdVbx(const VbxArgs& args, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    args.params.Validate();
    PldaModel plda = ParsePlda(ReadTextFile(args.plda));
    if (!args.plda2.empty()) {
      plda = InterpolatePlda(plda, ParsePlda(ReadTextFile(args.plda2)), args.alpha);
    }
    std::optional<Preprocessor> transform;
    if (!args.transform.empty()) transform = ParsePreprocessor(ReadTextFile(args.transform));
    std::map<std::string, Annotation> overlaps;
    if (!args.overlap_rttm.empty()) overlaps = ByRecording(ReadRttmFile(args.overlap_rttm));

    const std::vector<std::string> files = FilesWithExtension(args.embeddings_dir, ".emb");
    std::vector<Annotation> results(files.size());
    ParallelFor(files.size(), ResolveThreads(args.threads), [&](std::size_t i) {
      EmbeddingSequence seq = ParseEmbeddings(ReadTextFile(files[i]));
      if (transform && seq.size() > 0) seq.vectors = transform->Apply(seq.vectors);
      Annotation diar = DiarizeEmbeddings(seq, plda, args.ahc_threshold, args.params);
      auto it = overlaps.find(seq.recording_id);
      if (it != overlaps.end()) diar = AssignOverlaps(diar, it->second.Support());
      results[i] = std::move(diar);
    });
    Emit(args.output, WriteRttm(results), out);
    return kExitOk;
  });
}

int CmdPostprocess(const PostprocessArgs& args, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    if (args.vad_dirs.empty()) throw Error(ErrorCode::kInvalidArgument, "no VAD directory given");
    if (args.recover && args.post_dir.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "missed-speech recovery needs speaker posteriors");
    }
    std::vector<Annotation> results;
    for (Annotation& diar : ReadRttmFile(args.diar)) {
      const std::string rec = diar.recording_id();
      std::vector<PosteriorMatrix> streams;
      for (const std::string& dir : args.vad_dirs) streams.push_back(LoadPosteriors(dir, rec));
      const Timeline vad = FuseVad(streams, args.threshold, args.median);
      if (args.filter) diar = FilterFalseAlarms(diar, vad);
      if (args.recover) {
        const PosteriorMatrix post = LoadPosteriors(args.post_dir, rec);
        if (std::abs(post.frame_shift - streams.front().frame_shift) > 1e-9 ||
            post.num_frames() != streams.front().num_frames()) {
          throw Error(ErrorCode::kGridMismatch,
                      "VAD and speaker posteriors of '" + rec + "' use different frame grids");
        }
        diar = RecoverMissed(diar, vad, args.align_rows ? AlignPosteriorRows(post, diar, args.threshold) : post);
      }
      results.push_back(std::move(diar));
    }
    Emit(args.output, WriteRttm(results), out);
    return kExitOk;
  });
}

int CmdIterate(const IterateArgs& args, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    IterConfig config;
    config.k_first = args.k_first;
    config.k_later = args.k_later;
    config.activity_threshold = args.threshold;
    config.max_rounds = args.max_rounds;
    config.Validate();
    const auto source = FilePosteriorSource(args.source_dir, args.max_speakers);
    const std::vector<std::string> recordings = source->recordings();
    std::vector<Annotation> results(recordings.size());
    ParallelFor(recordings.size(), ResolveThreads(args.threads), [&](std::size_t i) {
      const auto local = source->Clone();
      results[i] = args.ensemble ? MultiKEnsemble(*local, recordings[i], config)
                                 : IterativeInference(*local, recordings[i], config).annotation;
    });
    Emit(args.output, WriteRttm(results), out);
    return kExitOk;
  });
}

int CmdSynth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    ScenarioSpec spec;
    spec.num_speakers = args.speakers;
    spec.duration = args.duration;
    spec.target_overlap_ratio = args.overlap;
    spec.mean_turn = args.mean_turn;
    spec.seed = args.seed;
    spec.recording_id = args.recording_id;
    const Annotation ref = GenReference(spec);
    Emit(args.output, WriteRttm(ref), out);

    if (!args.hyp_output.empty()) {
      CorruptionSpec corruption;
      corruption.boundary_jitter_std = args.jitter;
      corruption.deletion_rate = args.deletion;
      corruption.insertion_rate = args.insertion;
      corruption.confusion_rate = args.confusion;
      corruption.seed = args.hyp_seed;
      Emit(args.hyp_output, WriteRttm(Corrupt(ref, corruption)), out);
    }
    if (!args.posteriors_output.empty()) {
      Emit(args.posteriors_output,
           WritePosteriorsText(GenPosteriors(ref, args.frame_shift, args.noise, args.seed)), out);
    }
    if (!args.embeddings_output.empty() || !args.plda_output.empty()) {
      const PldaModel plda = RandomPlda(args.plda_dim, args.separation, args.seed);
      if (!args.plda_output.empty()) Emit(args.plda_output, WritePlda(plda), out);
      if (!args.embeddings_output.empty()) {
        const SyntheticEmbeddings emb = GenEmbeddings(ref, plda, args.window, args.hop, args.seed);
        Emit(args.embeddings_output, WriteEmbeddingsText(emb.sequence), out);
      }
    }
    return kExitOk;
  });
}

int CmdPipeline(const PipelineArgs& args, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    const Pipeline pipeline = Pipeline::Load(args.config);
    const PipelineResult result = pipeline.Run(args.threads);
    const std::string output = args.output.empty() ? pipeline.output_path() : args.output;
    const std::string report = args.report.empty() ? pipeline.report_path() : args.report;
    Emit(output, WriteRttm(result.outputs), out);
    if (!report.empty()) Emit(report, result.report.Format(), out);
    return kExitOk;
  });
}

}  // namespace dforge
