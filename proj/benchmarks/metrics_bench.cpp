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

#include <benchmark/benchmark.h>

#include "dforge/assignment.hpp"
#include "dforge/metrics.hpp"
#include "dforge/rttm.hpp"
#include "dforge/synth.hpp"

namespace dforge {
namespace {

void BM_ComputeDer(benchmark::State& state) {
  const double duration = static_cast<double>(state.range(0));
  const Annotation ref = GenReference({4, duration, 0.2, 2.5, 1, "rec"});
  const Annotation hyp = Corrupt(ref, {0.2, 0.1, 0.1, 0.1, 2});
  for (auto _ : state) benchmark::DoNotOptimize(ComputeDer(ref, hyp));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ref.turns().size()));
}
BENCHMARK(BM_ComputeDer)->Arg(300)->Arg(1800)->Arg(7200);

void BM_ComputeJer(benchmark::State& state) {
  const Annotation ref = GenReference({4, 1800.0, 0.2, 2.5, 1, "rec"});
  const Annotation hyp = Corrupt(ref, {0.2, 0.1, 0.1, 0.1, 2});
  for (auto _ : state) benchmark::DoNotOptimize(ComputeJer(ref, hyp));
}
BENCHMARK(BM_ComputeJer);

void BM_Assignment(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd m = Eigen::MatrixXd::Random(n, n + 2).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(SolveMaxAssignment(m));
}
BENCHMARK(BM_Assignment)->Arg(4)->Arg(16)->Arg(64);

void BM_RttmRoundTrip(benchmark::State& state) {
  const std::string text = WriteRttm(GenReference({6, 3600.0, 0.2, 2.5, 3, "rec"}));
  for (auto _ : state) benchmark::DoNotOptimize(WriteRttm(ParseRttm(text)));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_RttmRoundTrip);

}  // namespace
}  // namespace dforge
