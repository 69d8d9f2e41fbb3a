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

// Maximum-weight bipartite assignment (Hungarian method on the padded square
// problem). Returns, per row, the assigned column or -1. Among optimal
// assignments the lexicographically smallest row->column vector wins, with
// "unassigned" ordered after every real column.
std::vector<int> SolveMaxAssignment(const Eigen::MatrixXd& weights);

// Optimal value of the assignment problem (no tie-breaking pass).
double MaxAssignmentValue(const Eigen::MatrixXd& weights);

}  // namespace dforge
