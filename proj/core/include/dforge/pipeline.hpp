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

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dforge/config.hpp"
#include "dforge/metrics.hpp"
#include "dforge/timeline.hpp"

namespace dforge {

// Worker count: `requested` when positive, else DIARIZE_FORGE_THREADS when
// set, else `configured` when positive, else the hardware concurrency.
int ResolveThreads(int requested, int configured = 0);

// Calls fn(i) for i in [0, n) on up to `threads` workers. If any call
// throws, the exception of the smallest failing index is rethrown after all
// workers finish.
void ParallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

struct RecordingReport {
  std::string recording_id;
  double seconds = 0.0;
  // Indexed like RunReport::scored_stages.
  std::vector<RecordingScore> scores;
};

struct RunReport {
  std::vector<std::string> scored_stages;
  std::vector<RecordingReport> recordings;
  double total_seconds = 0.0;
  std::vector<CorpusScore> totals;  // one per scored stage

  std::string Format() const;
};

struct PipelineResult {
  std::vector<Annotation> outputs;  // in recording order
  RunReport report;
};

class Stage;

// A validated stage graph. Stages run in file order for every recording;
// each may only read stages declared before it.
class Pipeline {
 public:
  // Relative paths in the config resolve against base_dir.
  static Pipeline FromConfig(const Config& config, const std::string& base_dir);
  static Pipeline Load(const std::string& path);

  Pipeline(Pipeline&&) noexcept;
  Pipeline& operator=(Pipeline&&) noexcept;
  ~Pipeline();

  const std::vector<std::string>& recordings() const { return recordings_; }
  std::vector<std::string> stage_names() const;
  const std::string& output_path() const { return output_path_; }
  const std::string& report_path() const { return report_path_; }
  int configured_threads() const { return threads_; }

  PipelineResult Run(int threads) const;

 private:
  Pipeline();

  std::vector<std::unique_ptr<Stage>> stages_;
  std::vector<std::string> stage_display_names_;
  std::vector<std::string> recordings_;
  std::size_t output_stage_ = 0;
  std::optional<std::size_t> reference_stage_;
  double collar_ = 0.0;
  int threads_ = 0;
  std::string output_path_;
  std::string report_path_;
};

}  // namespace dforge
