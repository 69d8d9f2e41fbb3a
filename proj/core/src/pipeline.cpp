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

#include "dforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "dforge/error.hpp"
#include "dforge/frames.hpp"
#include "dforge/fusion.hpp"
#include "dforge/infer.hpp"
#include "dforge/matrix_io.hpp"
#include "dforge/rng.hpp"
#include "dforge/rttm.hpp"
#include "dforge/stream_post.hpp"
#include "dforge/synth.hpp"
#include "dforge/vbx.hpp"

namespace dforge {

namespace fs = std::filesystem;

int ResolveThreads(int requested, int configured) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DIARIZE_FORGE_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("DIARIZE_FORGE_THREADS must be a positive integer, got '") + env + "'");
    }
    return static_cast<int>(v);
  }
  if (configured > 0) return configured;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void ParallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::size_t failed_index = n;
  std::exception_ptr failure;

  const auto work = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

std::string FormatSeconds(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string FormatPercent(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * *v);
  return buf;
}

void AppendScoreRow(std::string& out, const std::string& recording, const std::string& seconds,
                    const std::string& stage, const DerBreakdown& der,
                    const std::optional<double>& jer) {
  out += recording + '\t' + seconds + '\t' + stage + '\t' + FormatSeconds(der.missed) + '\t' +
         FormatSeconds(der.false_alarm) + '\t' + FormatSeconds(der.confusion) + '\t' +
         FormatSeconds(der.total_ref_speech) + '\t' + FormatPercent(der.der) + '\t' +
         FormatPercent(jer) + '\n';
}

// 64-bit FNV-1a; derives per-recording seeds from recording ids.
std::uint64_t HashId(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t RecordingSeed(std::uint64_t seed, const std::string& recording_id) {
  return SplitMix64(seed ^ HashId(recording_id));
}

}  // namespace

std::string RunReport::Format() const {
  std::string out = "recording\tseconds\tstage\tMI\tFA\tCF\tref\tDER%\tJER%\n";
  for (const RecordingReport& rec : recordings) {
    if (scored_stages.empty()) {
      out += rec.recording_id + '\t' + FormatSeconds(rec.seconds) + '\n';
      continue;
    }
    for (std::size_t s = 0; s < scored_stages.size(); ++s) {
      AppendScoreRow(out, rec.recording_id, FormatSeconds(rec.seconds), scored_stages[s],
                     rec.scores[s].der, rec.scores[s].jer);
    }
  }
  if (scored_stages.empty()) {
    out += "TOTAL\t" + FormatSeconds(total_seconds) + '\n';
  }
  for (std::size_t s = 0; s < scored_stages.size(); ++s) {
    AppendScoreRow(out, "TOTAL", FormatSeconds(total_seconds), scored_stages[s], totals[s].der,
                   totals[s].jer);
  }
  return out;
}

struct RecordingContext {
  std::string recording_id;
  std::vector<Annotation> results;  // outputs of the stages run so far
};

class Stage {
 public:
  explicit Stage(std::string name) : name_(std::move(name)) {}
  virtual ~Stage() = default;

  const std::string& name() const { return name_; }
  virtual std::vector<std::string> Recordings() const { return {}; }
  virtual Annotation Run(const RecordingContext& ctx) const = 0;

 private:
  std::string name_;
};

namespace {

struct BuildContext {
  fs::path base_dir;
  std::map<std::string, std::size_t> stage_index;

  std::size_t StageRef(const ConfigSection& s, const std::string& key) const {
    return Lookup(s, key, s.GetString(key));
  }

  std::optional<std::size_t> OptionalStageRef(const ConfigSection& s, const std::string& key) const {
    if (!s.Has(key)) return std::nullopt;
    return StageRef(s, key);
  }

  std::size_t Lookup(const ConfigSection& s, const std::string& key, const std::string& name) const {
    auto it = stage_index.find(name);
    if (it == stage_index.end()) {
      s.Fail(key, "no earlier stage named '" + name + "'");
    }
    return it->second;
  }

  std::string Path(const ConfigSection& s, const std::string& key, bool directory) const {
    return Resolve(s, key, s.GetString(key), directory);
  }

  std::string Resolve(const ConfigSection& s, const std::string& key, const std::string& raw,
                      bool directory) const {
    fs::path p = raw;
    if (p.is_relative()) p = base_dir / p;
    const bool ok = directory ? fs::is_directory(p) : fs::is_regular_file(p);
    if (!ok) {
      s.Fail(key, (directory ? "directory '" : "file '") + p.string() + "' does not exist");
    }
    return p.string();
  }
};

std::string RecordingFile(const std::string& dir, const std::string& recording_id,
                          const std::string& extension) {
  const fs::path p = fs::path(dir) / (recording_id + extension);
  if (!fs::is_regular_file(p)) {
    throw Error(ErrorCode::kMissingRecording, "'" + p.string() + "' not found");
  }
  return p.string();
}

std::vector<std::string> ListRecordings(const std::string& dir, const std::string& extension) {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      out.push_back(entry.path().stem().string());
    }
  }
  return out;
}

PosteriorMatrix LoadPosteriors(const std::string& dir, const std::string& recording_id) {
  PosteriorMatrix m = ParsePosteriors(ReadTextFile(RecordingFile(dir, recording_id, ".post")));
  if (m.recording_id != recording_id) {
    throw Error(ErrorCode::kFormatError, "posteriors in '" + dir + "' for '" + recording_id +
                                             "' name recording '" + m.recording_id + "'");
  }
  return m;
}

// Noisy posteriors of an earlier stage's annotation on a grid covering
// [0, end).
struct OracleSpec {
  std::size_t stage = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  double frame_shift = 0.01;

  void Read(const ConfigSection& s, const BuildContext& b, const std::string& prefix) {
    stage = b.StageRef(s, prefix + "oracle");
    noise = s.GetDouble(prefix + "noise", 0.0, 0.0, 1e9);
    seed = s.GetSeed(prefix + "seed", 0);
    frame_shift = s.GetDouble(prefix + "frame_shift", 0.01, 1e-4, 10.0);
  }

  PosteriorMatrix Make(const RecordingContext& ctx, double end, bool speech_only) const {
    Annotation ann = ctx.results[stage].WithRecordingId(ctx.recording_id);
    if (speech_only) {
      ann = Annotation::FromTracks(ctx.recording_id, {{"speech", ann.Support()}});
    }
    const Eigen::Index frames = FramesToCover(std::max(end, ann.End()), frame_shift);
    return GenPosteriors(ann, frame_shift, noise, RecordingSeed(seed, ctx.recording_id),
                         std::max<Eigen::Index>(frames, 1));
  }
};

class InputStage : public Stage {
 public:
  InputStage(const ConfigSection& s, const BuildContext& b) : Stage(s.name()) {
    for (Annotation& a : ReadRttmFile(b.Path(s, "rttm", false))) {
      std::string id = a.recording_id();
      annotations_.emplace(std::move(id), std::move(a));
    }
  }
  std::vector<std::string> Recordings() const override {
    std::vector<std::string> out;
    for (const auto& entry : annotations_) out.push_back(entry.first);
    return out;
  }
  Annotation Run(const RecordingContext& ctx) const override {
    auto it = annotations_.find(ctx.recording_id);
    return it == annotations_.end() ? Annotation(ctx.recording_id) : it->second;
  }

 private:
  std::map<std::string, Annotation> annotations_;
};

class SynthStage : public Stage {
 public:
  explicit SynthStage(const ConfigSection& s) : Stage(s.name()) {
    const int count = s.GetInt("recordings", 1, 1, 1000000);
    const std::string prefix = s.GetString("prefix", "synth");
    spec_.num_speakers = s.GetInt("speakers", 2, 1, 1000);
    spec_.duration = s.GetDouble("duration", 60.0, 1e-3, 1e7);
    spec_.target_overlap_ratio = s.GetDouble("overlap", 0.0, 0.0, 0.999);
    spec_.mean_turn = s.GetDouble("mean_turn", 2.5, 1e-3, 1e6);
    spec_.seed = s.GetSeed("seed", 0);
    try {
      spec_.Validate();
    } catch (const Error& e) {
      s.Fail("overlap", e.what());
    }
    for (int i = 0; i < count; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "_%03d", i + 1);
      ids_.emplace(prefix + buf, static_cast<std::uint64_t>(i));
    }
  }
  std::vector<std::string> Recordings() const override {
    std::vector<std::string> out;
    for (const auto& entry : ids_) out.push_back(entry.first);
    return out;
  }
  Annotation Run(const RecordingContext& ctx) const override {
    auto it = ids_.find(ctx.recording_id);
    if (it == ids_.end()) return Annotation(ctx.recording_id);
    ScenarioSpec spec = spec_;
    spec.seed = spec_.seed + it->second;
    spec.recording_id = ctx.recording_id;
    return GenReference(spec);
  }

 private:
  ScenarioSpec spec_;
  std::map<std::string, std::uint64_t> ids_;
};

class CorruptStage : public Stage {
 public:
  CorruptStage(const ConfigSection& s, const BuildContext& b)
      : Stage(s.name()), input_(b.StageRef(s, "input")) {
    spec_.boundary_jitter_std = s.GetDouble("jitter", 0.0, 0.0, 1e6);
    spec_.deletion_rate = s.GetDouble("deletion", 0.0, 0.0, 1.0);
    spec_.insertion_rate = s.GetDouble("insertion", 0.0, 0.0, 1.0);
    spec_.confusion_rate = s.GetDouble("confusion", 0.0, 0.0, 1.0);
    spec_.seed = s.GetSeed("seed", 0);
  }
  Annotation Run(const RecordingContext& ctx) const override {
    CorruptionSpec spec = spec_;
    spec.seed = RecordingSeed(spec_.seed, ctx.recording_id);
    return Corrupt(ctx.results[input_], spec);
  }

 private:
  std::size_t input_;
  CorruptionSpec spec_;
};

class CombineStage : public Stage {
 public:
  CombineStage(const ConfigSection& s, const BuildContext& b) : Stage(s.name()) {
    for (const std::string& name : s.GetList("inputs")) inputs_.push_back(b.Lookup(s, "inputs", name));
    if (s.Has("weights")) {
      weights_ = s.GetDoubleList("weights");
      if (weights_.size() != inputs_.size()) {
        s.Fail("weights", std::to_string(weights_.size()) + " weights for " +
                              std::to_string(inputs_.size()) + " inputs");
      }
      for (double w : weights_) {
        if (!(w > 0.0)) s.Fail("weights", "weights must be positive");
      }
    }
    options_.rank_exponent = s.GetDouble("exponent", 1.0, 0.0, 1e3);
    const std::string rule = s.GetString("tie_rule", "modified");
    try {
      options_.tie_rule = ParseTieRule(rule);
    } catch (const Error&) {
      s.Fail("tie_rule", "expected 'modified' or 'original', got '" + rule + "'");
    }
  }
  Annotation Run(const RecordingContext& ctx) const override {
    HypothesisSet set;
    set.manual_weights = weights_;
    for (std::size_t i : inputs_) {
      set.hypotheses.push_back(ctx.results[i].WithRecordingId(ctx.recording_id));
    }
    return Combine(set, options_);
  }

 private:
  std::vector<std::size_t> inputs_;
  std::vector<double> weights_;
  FusionOptions options_;
};

class PostprocessStage : public Stage {
 public:
  PostprocessStage(const ConfigSection& s, const BuildContext& b)
      : Stage(s.name()), input_(b.StageRef(s, "input")) {
    if (s.Has("vad_dir")) {
      for (const std::string& d : s.GetList("vad_dir")) vad_dirs_.push_back(b.Resolve(s, "vad_dir", d, true));
    } else {
      vad_oracle_.emplace();
      vad_oracle_->Read(s, b, "vad_");
    }
    filter_ = s.GetBool("filter", true);
    recover_ = s.GetBool("recover", true);
    if (recover_) {
      if (s.Has("post_dir")) {
        post_dir_ = b.Path(s, "post_dir", true);
      } else {
        post_oracle_.emplace();
        post_oracle_->Read(s, b, "post_");
      }
      align_rows_ = s.GetBool("align_rows", post_oracle_.has_value());
    }
    threshold_ = s.GetDouble("threshold", 0.5, 0.0, 1.0);
    median_ = s.GetInt("median", 11, 1, 100001);
    if (median_ % 2 == 0) s.Fail("median", "window must be odd");
  }

  Annotation Run(const RecordingContext& ctx) const override {
    Annotation diar = ctx.results[input_].WithRecordingId(ctx.recording_id);
    const double end = diar.End();
    std::vector<PosteriorMatrix> streams;
    for (const std::string& dir : vad_dirs_) streams.push_back(LoadPosteriors(dir, ctx.recording_id));
    if (vad_oracle_) streams.push_back(vad_oracle_->Make(ctx, end, true));
    const Timeline vad = FuseVad(streams, threshold_, median_);
    if (filter_) diar = FilterFalseAlarms(diar, vad);
    if (recover_) {
      const PosteriorMatrix post = post_oracle_ ? post_oracle_->Make(ctx, end, false)
                                                : LoadPosteriors(post_dir_, ctx.recording_id);
      CheckGrid(streams.front(), post);
      diar = RecoverMissed(diar, vad, align_rows_ ? AlignPosteriorRows(post, diar, threshold_) : post);
    }
    return diar;
  }

  static void CheckGrid(const PosteriorMatrix& vad, const PosteriorMatrix& post) {
    if (std::abs(vad.frame_shift - post.frame_shift) > 1e-9 || vad.num_frames() != post.num_frames()) {
      throw Error(ErrorCode::kGridMismatch,
                  "VAD and speaker posteriors of '" + vad.recording_id + "' use different frame grids");
    }
  }

 private:
  std::size_t input_;
  std::vector<std::string> vad_dirs_;
  std::optional<OracleSpec> vad_oracle_;
  std::string post_dir_;
  std::optional<OracleSpec> post_oracle_;
  bool filter_ = true;
  bool recover_ = true;
  bool align_rows_ = false;
  double threshold_ = 0.5;
  int median_ = 11;
};

class IterateStage : public Stage {
 public:
  IterateStage(const ConfigSection& s, const BuildContext& b) : Stage(s.name()) {
    if (s.Has("source_dir")) {
      source_dir_ = b.Path(s, "source_dir", true);
    } else {
      oracle_.emplace();
      oracle_->Read(s, b, "");
    }
    config_.k_first = s.GetInt("k_first", 5, 1, 5);
    config_.k_later = s.GetInt("k_later", 5, 1, 1000);
    config_.activity_threshold = s.GetDouble("threshold", 0.5, 0.0, 1.0);
    config_.max_rounds = s.GetInt("max_rounds", 10, 1, 100000);
    max_speakers_ = s.GetInt("max_speakers", 5, 1, 1000);
    ensemble_ = s.GetBool("ensemble", false);
    if (config_.k_first > config_.k_later) s.Fail("k_first", "k_first exceeds k_later");
  }
  std::vector<std::string> Recordings() const override {
    return source_dir_.empty() ? std::vector<std::string>{} : ListRecordings(source_dir_, ".post");
  }
  Annotation Run(const RecordingContext& ctx) const override {
    MatrixPosteriorSource source({}, max_speakers_);
    source.Add(oracle_ ? oracle_->Make(ctx, 0.0, false) : LoadPosteriors(source_dir_, ctx.recording_id));
    Annotation out = ensemble_ ? MultiKEnsemble(source, ctx.recording_id, config_)
                               : IterativeInference(source, ctx.recording_id, config_).annotation;
    return out;
  }

 private:
  std::string source_dir_;
  std::optional<OracleSpec> oracle_;
  IterConfig config_;
  int max_speakers_ = 5;
  bool ensemble_ = false;
};

class VbxStage : public Stage {
 public:
  VbxStage(const ConfigSection& s, const BuildContext& b) : Stage(s.name()) {
    if (s.Has("plda")) {
      plda_ = ParsePlda(ReadTextFile(b.Path(s, "plda", false)));
      if (s.Has("plda2")) {
        const PldaModel second = ParsePlda(ReadTextFile(b.Path(s, "plda2", false)));
        plda_ = InterpolatePlda(plda_, second, s.GetDouble("alpha", 0.5, 0.0, 1.0));
      }
    } else {
      plda_ = RandomPlda(s.GetInt("plda_dim", 16, 1, 4096), s.GetDouble("separation", 25.0, 1e-9, 1e12),
                         s.GetSeed("plda_seed", 0));
    }
    if (s.Has("transform")) {
      transform_ = ParsePreprocessor(ReadTextFile(b.Path(s, "transform", false)));
    }
    if (s.Has("embeddings_dir")) {
      embeddings_dir_ = b.Path(s, "embeddings_dir", true);
    } else {
      oracle_ = b.StageRef(s, "oracle");
      window_ = s.GetDouble("window", 1.5, 1e-3, 1e4);
      hop_ = s.GetDouble("hop", 0.25, 1e-3, 1e4);
      seed_ = s.GetSeed("seed", 0);
    }
    ahc_threshold_ = s.GetDouble("ahc_threshold", 0.0);
    params_.p_loop = s.GetDouble("p_loop", params_.p_loop, 0.0, 1.0);
    params_.fa = s.GetDouble("fa", params_.fa, 1e-9, 1e9);
    params_.fb = s.GetDouble("fb", params_.fb, 1e-9, 1e9);
    params_.max_iters = s.GetInt("max_iters", params_.max_iters, 1, 100000);
    params_.elbo_tol = s.GetDouble("elbo_tol", params_.elbo_tol, 0.0, 1.0);
    params_.min_occupancy = s.GetDouble("min_occupancy", params_.min_occupancy, 0.0, 1.0);
    try {
      params_.Validate();
    } catch (const Error& e) {
      s.Fail("p_loop", e.what());
    }
  }
  std::vector<std::string> Recordings() const override {
    return embeddings_dir_.empty() ? std::vector<std::string>{} : ListRecordings(embeddings_dir_, ".emb");
  }
  Annotation Run(const RecordingContext& ctx) const override {
    EmbeddingSequence seq;
    if (oracle_) {
      seq = GenEmbeddings(ctx.results[*oracle_].WithRecordingId(ctx.recording_id), plda_, window_,
                          hop_, RecordingSeed(seed_, ctx.recording_id))
                .sequence;
    } else {
      seq = ParseEmbeddings(ReadTextFile(RecordingFile(embeddings_dir_, ctx.recording_id, ".emb")));
      seq.recording_id = ctx.recording_id;
    }
    if (transform_ && seq.size() > 0) seq.vectors = transform_->Apply(seq.vectors);
    return DiarizeEmbeddings(seq, plda_, ahc_threshold_, params_);
  }

 private:
  PldaModel plda_;
  std::optional<Preprocessor> transform_;
  std::string embeddings_dir_;
  std::optional<std::size_t> oracle_;
  double window_ = 1.5, hop_ = 0.25;
  std::uint64_t seed_ = 0;
  double ahc_threshold_ = 0.0;
  VbxParams params_;
};

class AssignOverlapsStage : public Stage {
 public:
  AssignOverlapsStage(const ConfigSection& s, const BuildContext& b)
      : Stage(s.name()), input_(b.StageRef(s, "input")), overlap_(b.StageRef(s, "overlap")) {}
  Annotation Run(const RecordingContext& ctx) const override {
    return AssignOverlaps(ctx.results[input_].WithRecordingId(ctx.recording_id),
                          ctx.results[overlap_].OverlapSupport());
  }

 private:
  std::size_t input_;
  std::size_t overlap_;
};

class EendaspStage : public Stage {
 public:
  EendaspStage(const ConfigSection& s, const BuildContext& b)
      : Stage(s.name()), input_(b.StageRef(s, "input")) {
    oracle_.Read(s, b, "");
    options_.rounds = s.GetInt("rounds", 1, 1, 1000);
    options_.activity_threshold = s.GetDouble("threshold", 0.5, 0.0, 1.0);
  }
  Annotation Run(const RecordingContext& ctx) const override {
    const Annotation initial = ctx.results[input_].WithRecordingId(ctx.recording_id);
    MatrixPosteriorSource source({}, 2);
    source.Add(oracle_.Make(ctx, initial.End(), false));
    return EendaspRefine(initial, source, options_);
  }

 private:
  std::size_t input_;
  OracleSpec oracle_;
  RefineOptions options_;
};

std::unique_ptr<Stage> MakeStage(const ConfigSection& s, const BuildContext& b) {
  const std::string type = s.GetString("type");
  std::unique_ptr<Stage> stage;
  if (type == "input") {
    stage = std::make_unique<InputStage>(s, b);
  } else if (type == "synth") {
    stage = std::make_unique<SynthStage>(s);
  } else if (type == "corrupt") {
    stage = std::make_unique<CorruptStage>(s, b);
  } else if (type == "combine") {
    stage = std::make_unique<CombineStage>(s, b);
  } else if (type == "postprocess") {
    stage = std::make_unique<PostprocessStage>(s, b);
  } else if (type == "iterate") {
    stage = std::make_unique<IterateStage>(s, b);
  } else if (type == "vbx") {
    stage = std::make_unique<VbxStage>(s, b);
  } else if (type == "assign_overlaps") {
    stage = std::make_unique<AssignOverlapsStage>(s, b);
  } else if (type == "eendasp") {
    stage = std::make_unique<EendaspStage>(s, b);
  } else {
    s.Fail("type", "unknown stage type '" + type + "'");
  }
  s.RejectUnknown();
  return stage;
}

}  // namespace

Pipeline::Pipeline() = default;
Pipeline::Pipeline(Pipeline&&) noexcept = default;
Pipeline& Pipeline::operator=(Pipeline&&) noexcept = default;
Pipeline::~Pipeline() = default;

std::vector<std::string> Pipeline::stage_names() const { return stage_display_names_; }

Pipeline Pipeline::FromConfig(const Config& config, const std::string& base_dir) {
  Pipeline p;
  BuildContext b{base_dir, {}};
  const ConfigSection* settings = nullptr;
  for (const ConfigSection& s : config.sections) {
    if (s.name() == "pipeline") {
      settings = &s;
      continue;
    }
    if (s.name().rfind("stage.", 0) != 0 || s.name().size() == 6) {
      throw LineError(ErrorCode::kConfigError, s.line(),
                      "unknown section [" + s.name() + "]; expected [pipeline] or [stage.NAME]");
    }
    const std::string name = s.name().substr(6);
    p.stages_.push_back(MakeStage(s, b));
    b.stage_index.emplace(name, p.stages_.size() - 1);
  }
  if (p.stages_.empty()) throw Error(ErrorCode::kConfigError, "no [stage.NAME] sections");
  // Stage objects are named by their section; strip the prefix for reports.
  std::vector<std::string> names(p.stages_.size());
  for (const auto& [name, index] : b.stage_index) names[index] = name;

  p.output_stage_ = p.stages_.size() - 1;
  if (settings) {
    const ConfigSection& s = *settings;
    p.threads_ = s.GetInt("threads", 0, 0, 4096);
    p.collar_ = s.GetDouble("collar", 0.0, 0.0, 1e6);
    if (s.Has("output")) {
      fs::path out = s.GetString("output");
      if (out.is_relative()) out = b.base_dir / out;
      p.output_path_ = out.string();
    }
    if (s.Has("report")) {
      fs::path out = s.GetString("report");
      if (out.is_relative()) out = b.base_dir / out;
      p.report_path_ = out.string();
    }
    if (s.Has("output_stage")) p.output_stage_ = b.StageRef(s, "output_stage");
    if (s.Has("reference")) p.reference_stage_ = b.StageRef(s, "reference");
    s.RejectUnknown();
  }

  std::set<std::string> recordings;
  for (const auto& stage : p.stages_) {
    for (std::string& r : stage->Recordings()) recordings.insert(std::move(r));
  }
  if (recordings.empty()) {
    throw Error(ErrorCode::kConfigError, "no stage provides any recording");
  }
  p.recordings_.assign(recordings.begin(), recordings.end());
  p.stage_display_names_ = std::move(names);
  return p;
}

Pipeline Pipeline::Load(const std::string& path) {
  const Config config = ParseConfig(ReadTextFile(path));
  return FromConfig(config, fs::path(path).parent_path().string());
}

PipelineResult Pipeline::Run(int threads) const {
  const std::size_t n = recordings_.size();
  PipelineResult result;
  result.outputs.resize(n);
  result.report.recordings.resize(n);
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    if (reference_stage_ && s != *reference_stage_) {
      result.report.scored_stages.push_back(stage_display_names_[s]);
    }
  }

  ParallelFor(n, ResolveThreads(threads, threads_), [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    RecordingContext ctx{recordings_[i], {}};
    for (const auto& stage : stages_) {
      try {
        ctx.results.push_back(stage->Run(ctx).WithRecordingId(ctx.recording_id));
      } catch (const Error& e) {
        const std::string detail = std::string(e.what()).substr(ToString(e.code()).size() + 2);
        throw Error(e.code(), "[" + stage->name() + "] recording '" + ctx.recording_id + "': " + detail);
      }
    }
    RecordingReport& rep = result.report.recordings[i];
    rep.recording_id = ctx.recording_id;
    if (reference_stage_) {
      const ScoringOptions opts{collar_, nullptr};
      for (std::size_t s = 0; s < stages_.size(); ++s) {
        if (s == *reference_stage_) continue;
        rep.scores.push_back(ScoreRecording(ctx.results[*reference_stage_], ctx.results[s], opts));
      }
    }
    result.outputs[i] = std::move(ctx.results[output_stage_]);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });

  RunReport& report = result.report;
  for (const RecordingReport& rep : report.recordings) report.total_seconds += rep.seconds;
  for (std::size_t s = 0; s < report.scored_stages.size(); ++s) {
    std::vector<RecordingScore> column;
    for (const RecordingReport& rep : report.recordings) column.push_back(rep.scores[s]);
    report.totals.push_back(AggregateScores(column));
  }
  return result;
}

}  // namespace dforge
