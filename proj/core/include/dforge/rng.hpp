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
#include <random>

namespace dforge {

// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t SplitMix64(std::uint64_t x);

// Portable generator: MT19937-64 with hand-written distributions, so a seed
// yields the same draws on every platform and standard library.
// Rng(seed, stream) gives independent per-entity streams of one seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n); n > 0.
  std::uint64_t UniformInt(std::uint64_t n);
  bool Bernoulli(double p) { return Uniform() < p; }
  // Standard normal via Box-Muller (one draw per call, no caching).
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }
  double Exponential(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace dforge
