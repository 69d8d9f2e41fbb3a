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

#include "dforge/preprocess.hpp"

#include <map>

#include <Eigen/Eigenvalues>

#include "dforge/error.hpp"

namespace dforge {
namespace {

// Adds eps * I with eps = 1e-6 * trace / D when the matrix is numerically
// singular. Returns true when it did.
bool Regularize(Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  const double max_ev = eig.eigenvalues().maxCoeff();
  if (eig.eigenvalues().minCoeff() > 1e-10 * std::max(max_ev, 1e-300)) return false;
  const double eps = 1e-6 * std::max(cov.trace(), 1e-12) / static_cast<double>(cov.rows());
  cov.diagonal().array() += eps;
  return true;
}

}  // namespace

Eigen::MatrixXd Preprocessor::Apply(const Eigen::MatrixXd& embeddings) const {
  if (embeddings.cols() != input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding dimension mismatch");
  }
  const Eigen::MatrixXd centred = embeddings.rowwise() - center.transpose();
  return centred * whitener.transpose() * lda_projection.transpose();
}

Preprocessor FitPreprocessor(const Eigen::MatrixXd& embeddings,
                             const std::optional<std::vector<int>>& labels,
                             Eigen::Index target_dim) {
  const Eigen::Index n = embeddings.rows();
  const Eigen::Index d = embeddings.cols();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two samples");
  if (target_dim < 1 || target_dim > d) {
    throw Error(ErrorCode::kInvalidArgument, "target_dim must lie in [1, D]");
  }
  if (!labels && target_dim < d) {
    throw Error(ErrorCode::kInvalidArgument, "dimension reduction requires labels");
  }
  if (labels && static_cast<Eigen::Index>(labels->size()) != n) {
    throw Error(ErrorCode::kLengthMismatch, "one label per embedding required");
  }

  Preprocessor pre;
  pre.center = embeddings.colwise().mean().transpose();
  const Eigen::MatrixXd centred = embeddings.rowwise() - pre.center.transpose();
  Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(n - 1);
  pre.regularized = Regularize(cov);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  pre.whitener = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();

  if (!labels) {
    pre.lda_projection = Eigen::MatrixXd::Identity(d, d);
    return pre;
  }

  const Eigen::MatrixXd white = centred * pre.whitener.transpose();
  std::map<int, std::vector<Eigen::Index>> classes;
  for (Eigen::Index i = 0; i < n; ++i) classes[(*labels)[i]].push_back(i);

  Eigen::MatrixXd within = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd between = Eigen::MatrixXd::Zero(d, d);
  for (const auto& [label, members] : classes) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
    for (Eigen::Index i : members) mean += white.row(i);
    mean /= static_cast<double>(members.size());
    for (Eigen::Index i : members) {
      const Eigen::RowVectorXd diff = white.row(i) - mean;
      within += diff.transpose() * diff;
    }
    between += static_cast<double>(members.size()) * mean.transpose() * mean;
  }
  within /= static_cast<double>(n);
  between /= static_cast<double>(n);
  pre.regularized = Regularize(within) || pre.regularized;

  // Eigenvectors come normalised so that v' W v = 1 and sorted ascending.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> gev(between, within);
  if (gev.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularCovariance, "LDA eigenproblem failed");
  }
  pre.lda_projection.resize(target_dim, d);
  for (Eigen::Index r = 0; r < target_dim; ++r) {
    pre.lda_projection.row(r) = gev.eigenvectors().col(d - 1 - r).transpose();
  }
  return pre;
}

}  // namespace dforge
