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

#include "dforge/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dforge {
namespace {

// Min-cost assignment on an n x n matrix (1-based potentials formulation).
// Returns column assigned to each row.
std::vector<int> HungarianMinSquare(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

// Optimal value on the padded square problem restricted to the given rows
// and columns.
double SubproblemValue(const Eigen::MatrixXd& square,
                       const std::vector<int>& rows,
                       const std::vector<int>& cols) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd cost(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cost(i, j) = -square(rows[i], cols[j]);
  }
  const auto assign = HungarianMinSquare(cost);
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += square(rows[i], cols[assign[i]]);
  return total;
}

Eigen::MatrixXd PadSquare(const Eigen::MatrixXd& weights) {
  const Eigen::Index n = std::max(weights.rows(), weights.cols());
  Eigen::MatrixXd square = Eigen::MatrixXd::Zero(n, n);
  square.topLeftCorner(weights.rows(), weights.cols()) = weights;
  return square;
}

}  // namespace

double MaxAssignmentValue(const Eigen::MatrixXd& weights) {
  if (weights.size() == 0) return 0.0;
  const Eigen::MatrixXd square = PadSquare(weights);
  std::vector<int> all(square.rows());
  for (int i = 0; i < static_cast<int>(all.size()); ++i) all[i] = i;
  return SubproblemValue(square, all, all);
}

std::vector<int> SolveMaxAssignment(const Eigen::MatrixXd& weights) {
  const int rows = static_cast<int>(weights.rows());
  const int cols = static_cast<int>(weights.cols());
  std::vector<int> result(rows, -1);
  if (rows == 0 || cols == 0) return result;

  const Eigen::MatrixXd square = PadSquare(weights);
  const int n = static_cast<int>(square.rows());
  std::vector<int> free_rows(n), free_cols(n);
  for (int i = 0; i < n; ++i) free_rows[i] = free_cols[i] = i;
  const double best = SubproblemValue(square, free_rows, free_cols);
  const double tol = 1e-9 * std::max(1.0, std::abs(best));

  // Fix rows one at a time, taking the smallest column that still admits an
  // optimal completion. Padding columns (>= cols) mean "unassigned" and are
  // naturally tried last.
  double fixed = 0.0;
  for (int i = 0; i < rows; ++i) {
    std::vector<int> rest_rows(free_rows.begin() + 1, free_rows.end());
    bool placed = false;
    for (std::size_t c = 0; c < free_cols.size() && !placed; ++c) {
      const int j = free_cols[c];
      std::vector<int> rest_cols = free_cols;
      rest_cols.erase(rest_cols.begin() + static_cast<long>(c));
      const double value = fixed + square(i, j) +
                           SubproblemValue(square, rest_rows, rest_cols);
      if (value >= best - tol) {
        fixed += square(i, j);
        result[i] = j < cols ? j : -1;
        free_cols = std::move(rest_cols);
        placed = true;
      }
    }
    free_rows = std::move(rest_rows);
  }
  return result;
}

}  // namespace dforge
