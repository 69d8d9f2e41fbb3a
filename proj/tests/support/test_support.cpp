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

#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "dforge/rng.hpp"

namespace dforge::testing {

Annotation MakeAnnotation(const std::vector<Span>& spans, const std::string& rec) {
  std::vector<Turn> turns;
  for (const Span& s : spans) turns.push_back({rec, s.speaker, s.start, s.end - s.start});
  return Annotation(rec, std::move(turns));
}

Annotation RandomAnnotation(std::uint64_t seed, int max_speakers, int max_turns, double horizon,
                            const std::string& prefix, const std::string& rec) {
  Rng rng(seed, 77);
  const int speakers = 1 + static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(max_speakers)));
  const int turns = 1 + static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(max_turns)));
  const auto ms = static_cast<std::uint64_t>(horizon * 1000.0);
  std::vector<Span> spans;
  for (int i = 0; i < turns; ++i) {
    const double a = static_cast<double>(rng.UniformInt(ms)) / 1000.0;
    const double len = static_cast<double>(1 + rng.UniformInt(ms / 4)) / 1000.0;
    const int s = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(speakers)));
    spans.push_back({prefix + std::to_string(s), a, std::min(horizon, a + len)});
  }
  spans.erase(std::remove_if(spans.begin(), spans.end(),
                             [](const Span& s) { return s.end - s.start < 1e-3; }),
              spans.end());
  return MakeAnnotation(spans, rec);
}

double BruteForceMaxAssignment(const Eigen::MatrixXd& m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  std::vector<bool> used(static_cast<std::size_t>(rows), false);
  std::function<double(Eigen::Index)> best = [&](Eigen::Index j) -> double {
    if (j == cols) return 0.0;
    double value = best(j + 1);  // column j unassigned
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      used[static_cast<std::size_t>(i)] = true;
      value = std::max(value, m(i, j) + best(j + 1));
      used[static_cast<std::size_t>(i)] = false;
    }
    return value;
  };
  return best(0);
}

std::tuple<double, double, double, double> FrameDerOracle(const Annotation& ref,
                                                          const Annotation& hyp) {
  const double end = std::max(ref.End(), hyp.End());
  const auto frames = static_cast<long>(std::llround(end * 1000.0));
  const auto refs = ref.Speakers();
  const auto hyps = hyp.Speakers();
  const auto active = [](const Annotation& a, const std::string& s, long t) {
    return a.SpeakerTimeline(s).Contains((static_cast<double>(t) + 0.5) / 1000.0);
  };
  std::vector<std::vector<bool>> r(refs.size(), std::vector<bool>(static_cast<std::size_t>(frames)));
  std::vector<std::vector<bool>> h(hyps.size(), std::vector<bool>(static_cast<std::size_t>(frames)));
  for (std::size_t i = 0; i < refs.size(); ++i)
    for (long t = 0; t < frames; ++t) r[i][static_cast<std::size_t>(t)] = active(ref, refs[i], t);
  for (std::size_t j = 0; j < hyps.size(); ++j)
    for (long t = 0; t < frames; ++t) h[j][static_cast<std::size_t>(t)] = active(hyp, hyps[j], t);

  // Exhaustive mapping maximising co-active frames.
  Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(refs.size()),
                                                  static_cast<Eigen::Index>(hyps.size()));
  for (std::size_t i = 0; i < refs.size(); ++i)
    for (std::size_t j = 0; j < hyps.size(); ++j)
      for (long t = 0; t < frames; ++t)
        if (r[i][static_cast<std::size_t>(t)] && h[j][static_cast<std::size_t>(t)])
          overlap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += 1.0;
  const double best = BruteForceMaxAssignment(overlap);

  double missed = 0, fa = 0, conf = 0, total = 0, correct_total = 0;
  for (long t = 0; t < frames; ++t) {
    int nr = 0, nh = 0;
    for (auto& row : r) nr += row[static_cast<std::size_t>(t)];
    for (auto& row : h) nh += row[static_cast<std::size_t>(t)];
    total += nr;
    missed += std::max(0, nr - nh);
    fa += std::max(0, nh - nr);
    conf += std::min(nr, nh);
  }
  correct_total = best;
  conf -= correct_total;
  return {missed / 1000.0, fa / 1000.0, conf / 1000.0, total / 1000.0};
}

std::filesystem::path TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("dforge_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace dforge::testing
