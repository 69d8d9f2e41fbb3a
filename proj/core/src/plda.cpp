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

#include "dforge/plda.hpp"

#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "dforge/error.hpp"

namespace dforge {
namespace {

Eigen::MatrixXd ClipToPsd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd out = eig.eigenvectors() * values.asDiagonal() *
                        eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

void PldaModel::Validate() const {
  const Eigen::Index d = mean.size();
  if (between_class.rows() != d || between_class.cols() != d ||
      within_class.rows() != d || within_class.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "PLDA covariance shape mismatch");
  }
  const double scale = 1.0 + within_class.cwiseAbs().maxCoeff() +
                       between_class.cwiseAbs().maxCoeff();
  if ((between_class - between_class.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale ||
      (within_class - within_class.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw Error(ErrorCode::kInvalidArgument, "PLDA covariances must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> w(within_class);
  if (w.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorCode::kSingularCovariance, "within-class covariance not PD");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b(between_class);
  if (b.eigenvalues().minCoeff() < -1e-9 * scale) {
    throw Error(ErrorCode::kInvalidArgument, "between-class covariance not PSD");
  }
}

PldaModel TrainPlda(const Eigen::MatrixXd& embeddings, const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != embeddings.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "one label per embedding required");
  }
  std::map<int, std::vector<Eigen::Index>> classes;
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) classes[labels[i]].push_back(i);
  if (classes.size() < 2) {
    throw Error(ErrorCode::kDegenerateClasses, "need at least two classes");
  }
  for (const auto& [label, members] : classes) {
    if (members.size() < 2) {
      throw Error(ErrorCode::kDegenerateClasses,
                  "class " + std::to_string(label) + " has fewer than two samples");
    }
  }

  const Eigen::Index d = embeddings.cols();
  const auto n = static_cast<double>(embeddings.rows());
  const auto c = static_cast<double>(classes.size());
  PldaModel model;
  model.mean = embeddings.colwise().mean().transpose();

  Eigen::MatrixXd within = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd means_scatter = Eigen::MatrixXd::Zero(d, d);
  double inv_count_sum = 0.0;
  for (const auto& [label, members] : classes) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(members.size()), d);
    for (std::size_t i = 0; i < members.size(); ++i) {
      x.row(static_cast<Eigen::Index>(i)) = embeddings.row(members[i]);
    }
    const Eigen::RowVectorXd class_mean = x.colwise().mean();
    const Eigen::MatrixXd centred = x.rowwise() - class_mean;
    within += centred.transpose() * centred;
    const Eigen::VectorXd diff = class_mean.transpose() - model.mean;
    means_scatter += diff * diff.transpose();
    inv_count_sum += 1.0 / static_cast<double>(members.size());
  }
  within /= (n - c);
  // Class means carry within-class noise W / n_c; remove it on average.
  Eigen::MatrixXd between = means_scatter / (c - 1.0) - within * (inv_count_sum / c);
  model.within_class = 0.5 * (within + within.transpose());
  model.between_class = ClipToPsd(between);
  return model;
}

PldaModel InterpolatePlda(const PldaModel& p1, const PldaModel& p2, double alpha) {
  if (p1.dim() != p2.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cannot interpolate PLDA models of dimension " +
                    std::to_string(p1.dim()) + " and " + std::to_string(p2.dim()));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1]");
  }
  if (alpha == 1.0) return p1;
  if (alpha == 0.0) return p2;
  PldaModel out;
  out.mean = alpha * p1.mean + (1.0 - alpha) * p2.mean;
  out.between_class = alpha * p1.between_class + (1.0 - alpha) * p2.between_class;
  out.within_class = alpha * p1.within_class + (1.0 - alpha) * p2.within_class;
  return out;
}

PldaSpace::PldaSpace(const PldaModel& model) : mean(model.mean) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> gev(
      model.between_class, model.within_class);
  if (gev.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularCovariance,
                "within-class covariance is not positive definite");
  }
  transform = gev.eigenvectors();
  psi = gev.eigenvalues().cwiseMax(0.0);
}

Eigen::MatrixXd PldaSpace::Project(const Eigen::MatrixXd& embeddings) const {
  return (embeddings.rowwise() - mean.transpose()) * transform;
}

namespace {

// Per-dimension coefficients of the LLR in the diagonalised space:
//   llr = const + sum_d [a_d (u_d^2 + v_d^2) + b_d u_d v_d]
struct LlrCoefficients {
  double constant = 0.0;
  Eigen::ArrayXd quad;
  Eigen::ArrayXd cross;

  explicit LlrCoefficients(const Eigen::VectorXd& psi) {
    const Eigen::ArrayXd p = psi.array();
    const Eigen::ArrayXd two_p1 = 2.0 * p + 1.0;
    constant = (-0.5 * two_p1.log() + (p + 1.0).log()).sum();
    quad = -0.5 * (p + 1.0) / two_p1 + 0.5 / (p + 1.0);
    cross = p / two_p1;
  }
};

}  // namespace

double PldaLlr(const PldaModel& model, const Eigen::VectorXd& e1,
               const Eigen::VectorXd& e2) {
  if (e1.size() != model.dim() || e2.size() != model.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding dimension mismatch");
  }
  const PldaSpace space(model);
  const LlrCoefficients coef(space.psi);
  const Eigen::ArrayXd u = (space.transform.transpose() * (e1 - model.mean)).array();
  const Eigen::ArrayXd v = (space.transform.transpose() * (e2 - model.mean)).array();
  return coef.constant + (coef.quad * (u.square() + v.square())).sum() +
         (coef.cross * u * v).sum();
}

Eigen::MatrixXd PldaLlrMatrix(const PldaModel& model, const Eigen::MatrixXd& embeddings) {
  if (embeddings.cols() != model.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding dimension mismatch");
  }
  const PldaSpace space(model);
  const LlrCoefficients coef(space.psi);
  const Eigen::MatrixXd z = space.Project(embeddings);
  const Eigen::VectorXd self = (z.array().square().rowwise() * coef.quad.transpose()).rowwise().sum();
  Eigen::MatrixXd llr = z * coef.cross.matrix().asDiagonal() * z.transpose();
  llr.colwise() += self;
  llr.rowwise() += self.transpose();
  llr.array() += coef.constant;
  return 0.5 * (llr + llr.transpose());
}

}  // namespace dforge
