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

#include <vector>

#include <Eigen/Core>

namespace dforge {

// Average-linkage agglomerative clustering on a symmetric similarity matrix.
// Merges while the best cluster-pair score exceeds `threshold`; ties go to
// the pair with the smallest indices. Labels are numbered by first
// appearance.
std::vector<int> Ahc(const Eigen::MatrixXd& scores, double threshold);

// Renumbers arbitrary labels 0.. in order of first appearance.
std::vector<int> CompactLabels(const std::vector<int>& labels);

}  // namespace dforge
