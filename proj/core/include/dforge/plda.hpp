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

// Two-covariance PLDA: x = mean + y + e, y ~ N(0, between_class),
// e ~ N(0, within_class).
struct PldaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd between_class;
  Eigen::MatrixXd within_class;

  Eigen::Index dim() const { return mean.size(); }
  // Symmetry to 1e-9, PSD between-class, PD within-class.
  void Validate() const;
};

// Rows of `embeddings` are samples; labels are arbitrary class ids.
PldaModel TrainPlda(const Eigen::MatrixXd& embeddings, const std::vector<int>& labels);

// alpha * p1 + (1 - alpha) * p2, field-wise.
PldaModel InterpolatePlda(const PldaModel& p1, const PldaModel& p2, double alpha);

// Simultaneous diagonalisation of the PLDA covariances: after
// z = (x - mean) * transform, within-class is identity and between-class is
// diag(psi).
struct PldaSpace {
  Eigen::VectorXd mean;
  Eigen::MatrixXd transform;  // D x D, columns are generalised eigenvectors
  Eigen::VectorXd psi;

  explicit PldaSpace(const PldaModel& model);

  Eigen::MatrixXd Project(const Eigen::MatrixXd& embeddings) const;
};

// log p(e1, e2 | same speaker) - log p(e1, e2 | different speakers).
double PldaLlr(const PldaModel& model, const Eigen::VectorXd& e1,
               const Eigen::VectorXd& e2);

// Pairwise LLR for every row pair of `embeddings`.
Eigen::MatrixXd PldaLlrMatrix(const PldaModel& model, const Eigen::MatrixXd& embeddings);

}  // namespace dforge
