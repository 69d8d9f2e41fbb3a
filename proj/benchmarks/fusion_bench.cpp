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

#include "dforge/fusion.hpp"
#include "dforge/synth.hpp"

namespace dforge {
namespace {

HypothesisSet Hypotheses(int count, double duration) {
  const Annotation ref = GenReference({4, duration, 0.2, 2.5, 5, "rec"});
  HypothesisSet set;
  for (int k = 0; k < count; ++k) {
    set.hypotheses.push_back(Corrupt(ref, {0.2, 0.05, 0.05, 0.1, static_cast<std::uint64_t>(k)}));
  }
  return set;
}

void BM_Combine(benchmark::State& state) {
  const HypothesisSet set = Hypotheses(static_cast<int>(state.range(0)), 600.0);
  for (auto _ : state) benchmark::DoNotOptimize(Combine(set));
}
BENCHMARK(BM_Combine)->Arg(3)->Arg(5)->Arg(8);

void BM_RankHypotheses(benchmark::State& state) {
  const HypothesisSet set = Hypotheses(5, 600.0);
  for (auto _ : state) benchmark::DoNotOptimize(RankHypotheses(set));
}
BENCHMARK(BM_RankHypotheses);

}  // namespace
}  // namespace dforge
