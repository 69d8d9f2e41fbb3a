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

#include "dforge/ahc.hpp"

#include <map>

#include "dforge/error.hpp"

namespace dforge {

std::vector<int> CompactLabels(const std::vector<int>& labels) {
  std::map<int, int> ids;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int label : labels) {
    auto [it, inserted] = ids.emplace(label, static_cast<int>(ids.size()));
    out.push_back(it->second);
  }
  return out;
}

std::vector<int> Ahc(const Eigen::MatrixXd& scores, double threshold) {
  if (scores.rows() != scores.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "AHC needs a square matrix");
  }
  const int n = static_cast<int>(scores.rows());
  Eigen::MatrixXd sim = scores;
  std::vector<int> size(n, 1);
  std::vector<char> active(n, 1);
  std::vector<int> owner(n);
  for (int i = 0; i < n; ++i) owner[i] = i;

  // best[i]: partner j > i with the highest score (smallest j on ties).
  std::vector<int> best(n, -1);
  auto refresh = [&](int i) {
    best[i] = -1;
    for (int j = i + 1; j < n; ++j) {
      if (!active[j]) continue;
      if (best[i] < 0 || sim(i, j) > sim(i, best[i])) best[i] = j;
    }
  };
  for (int i = 0; i < n; ++i) refresh(i);

  for (;;) {
    int bi = -1;
    for (int i = 0; i < n; ++i) {
      if (!active[i] || best[i] < 0) continue;
      if (bi < 0 || sim(i, best[i]) > sim(bi, best[bi])) bi = i;
    }
    if (bi < 0 || !(sim(bi, best[bi]) > threshold)) break;
    const int i = bi;
    const int j = best[bi];

    const double wi = size[i];
    const double wj = size[j];
    for (int k = 0; k < n; ++k) {
      if (!active[k] || k == i || k == j) continue;
      const double merged = (wi * sim(i, k) + wj * sim(j, k)) / (wi + wj);
      sim(i, k) = merged;
      sim(k, i) = merged;
    }
    size[i] += size[j];
    active[j] = 0;
    for (int t = 0; t < n; ++t) {
      if (owner[t] == j) owner[t] = i;
    }

    refresh(i);
    for (int k = 0; k < n; ++k) {
      if (!active[k] || k == i) continue;
      if (best[k] == i || best[k] == j) {
        refresh(k);
      } else if (k < i && best[k] >= 0 &&
                 (sim(k, i) > sim(k, best[k]) ||
                  (sim(k, i) == sim(k, best[k]) && i < best[k]))) {
        best[k] = i;
      } else if (k < i && best[k] < 0) {
        best[k] = i;
      }
    }
  }
  return CompactLabels(owner);
}

}  // namespace dforge
