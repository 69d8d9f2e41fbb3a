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

#include "dforge/vbx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dforge/ahc.hpp"
#include "dforge/error.hpp"

namespace dforge {

void EmbeddingSequence::Validate() const {
  if (static_cast<Eigen::Index>(windows.size()) != vectors.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "one window per embedding required");
  }
  for (std::size_t t = 1; t < windows.size(); ++t) {
    if (!(windows[t].start > windows[t - 1].start)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "embedding windows must be strictly increasing");
    }
  }
}

void VbxParams::Validate() const {
  if (!(p_loop > 0.0 && p_loop < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "p_loop must lie in (0, 1)");
  }
  if (!(fa > 0.0) || !(fb > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fa and fb must be positive");
  }
  if (max_iters < 1) throw Error(ErrorCode::kInvalidArgument, "max_iters < 1");
  if (min_occupancy < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "min_occupancy must be >= 0");
  }
}

namespace {

struct ForwardBackward {
  Eigen::MatrixXd gamma;
  double log_px = 0.0;
};

// Scaled forward-backward for an HMM whose transition matrix is
// p_loop on the diagonal and (1 - p_loop) / (S - 1) elsewhere, with a
// uniform initial distribution. O(T S).
ForwardBackward RunForwardBackward(const Eigen::MatrixXd& log_lik, double p_loop) {
  const Eigen::Index t_count = log_lik.rows();
  const Eigen::Index s_count = log_lik.cols();
  const double stay = s_count > 1 ? p_loop : 1.0;
  const double move = s_count > 1 ? (1.0 - p_loop) / static_cast<double>(s_count - 1) : 0.0;

  Eigen::MatrixXd emit(t_count, s_count);
  Eigen::VectorXd scale(t_count);
  ForwardBackward out;
  for (Eigen::Index t = 0; t < t_count; ++t) {
    const double m = log_lik.row(t).maxCoeff();
    emit.row(t) = (log_lik.row(t).array() - m).exp();
    out.log_px += m;
  }

  Eigen::MatrixXd fwd(t_count, s_count);
  for (Eigen::Index t = 0; t < t_count; ++t) {
    if (t == 0) {
      fwd.row(0) = emit.row(0) / static_cast<double>(s_count);
    } else {
      const double total = fwd.row(t - 1).sum();
      fwd.row(t) = emit.row(t).array() *
                   (stay * fwd.row(t - 1).array() +
                    move * (total - fwd.row(t - 1).array()));
    }
    scale(t) = fwd.row(t).sum();
    fwd.row(t) /= scale(t);
    out.log_px += std::log(scale(t));
  }

  Eigen::MatrixXd bwd(t_count, s_count);
  bwd.row(t_count - 1).setOnes();
  for (Eigen::Index t = t_count - 2; t >= 0; --t) {
    const Eigen::ArrayXXd next = emit.row(t + 1).array() * bwd.row(t + 1).array();
    const double total = next.sum();
    bwd.row(t) = (stay * next + move * (total - next)) / scale(t + 1);
  }

  out.gamma = fwd.cwiseProduct(bwd);
  for (Eigen::Index t = 0; t < t_count; ++t) out.gamma.row(t) /= out.gamma.row(t).sum();
  return out;
}

void NormalizeRows(Eigen::MatrixXd& gamma) {
  for (Eigen::Index t = 0; t < gamma.rows(); ++t) {
    const double sum = gamma.row(t).sum();
    if (sum > 1e-300) {
      gamma.row(t) /= sum;
    } else {
      gamma.row(t).setConstant(1.0 / static_cast<double>(gamma.cols()));
    }
  }
}

}  // namespace

VbxResult VbxCluster(const EmbeddingSequence& seq, const PldaModel& plda,
                     const std::vector<int>& init_labels, const VbxParams& params) {
  params.Validate();
  if (init_labels.empty()) throw Error(ErrorCode::kEmptyInit, "no initial labels");
  if (static_cast<Eigen::Index>(init_labels.size()) != seq.size()) {
    throw Error(ErrorCode::kLengthMismatch, "one initial label per embedding required");
  }
  if (seq.dim() != plda.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding and PLDA dimensions differ");
  }

  const PldaSpace space(plda);
  const Eigen::MatrixXd x = space.Project(seq.vectors);
  const Eigen::Index t_count = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::ArrayXd psi = space.psi.array();
  const Eigen::MatrixXd rho = x * psi.sqrt().matrix().asDiagonal();
  // log N(x_t; 0, I)
  const Eigen::VectorXd g =
      -0.5 * (x.rowwise().squaredNorm().array() +
              static_cast<double>(d) * std::log(2.0 * std::numbers::pi)).matrix();

  const std::vector<int> init = CompactLabels(init_labels);
  const int s_init = *std::max_element(init.begin(), init.end()) + 1;
  VbxResult result;
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(t_count, s_init);
  for (Eigen::Index t = 0; t < t_count; ++t) gamma(t, init[t]) = 1.0;
  for (int s = 0; s < s_init; ++s) result.cluster_ids.push_back(s);

  const double ratio = params.fa / params.fb;
  double prev_elbo = 0.0;
  bool has_prev = false;
  for (int iter = 0; iter < params.max_iters; ++iter) {
    const Eigen::Index s_count = gamma.cols();
    const Eigen::VectorXd occupancy = gamma.colwise().sum().transpose();

    // q(y_s): diagonal Gaussian in eigenvoice coordinates.
    Eigen::ArrayXXd inv_l(s_count, d);
    for (Eigen::Index s = 0; s < s_count; ++s) {
      inv_l.row(s) = (1.0 + ratio * occupancy(s) * psi).inverse().transpose();
    }
    const Eigen::ArrayXXd alpha = ratio * inv_l * (gamma.transpose() * rho).array();

    Eigen::MatrixXd log_lik = rho * alpha.matrix().transpose();
    const Eigen::VectorXd penalty =
        0.5 * ((inv_l + alpha.square()).matrix() * psi.matrix());
    log_lik.rowwise() -= penalty.transpose();
    log_lik.colwise() += g;
    log_lik *= params.fa;

    ForwardBackward fb = RunForwardBackward(log_lik, params.p_loop);
    gamma = std::move(fb.gamma);
    const double elbo =
        fb.log_px + params.fb * 0.5 * (inv_l.log() - inv_l - alpha.square() + 1.0).sum();
    result.elbo_trace.push_back(elbo);
    result.iterations = iter + 1;

    bool dropped = false;
    if (gamma.cols() > 1) {
      const Eigen::VectorXd occ = gamma.colwise().sum().transpose();
      const double floor = params.min_occupancy * static_cast<double>(t_count);
      std::vector<Eigen::Index> keep;
      for (Eigen::Index s = 0; s < gamma.cols(); ++s) {
        if (occ(s) >= floor) keep.push_back(s);
      }
      if (keep.empty()) {
        Eigen::Index best = 0;
        occ.maxCoeff(&best);
        keep.push_back(best);
      }
      if (static_cast<Eigen::Index>(keep.size()) < gamma.cols()) {
        Eigen::MatrixXd kept(t_count, static_cast<Eigen::Index>(keep.size()));
        std::vector<int> ids;
        for (std::size_t i = 0; i < keep.size(); ++i) {
          kept.col(static_cast<Eigen::Index>(i)) = gamma.col(keep[i]);
          ids.push_back(result.cluster_ids[keep[i]]);
        }
        NormalizeRows(kept);
        gamma = std::move(kept);
        result.cluster_ids = std::move(ids);
        result.restarts.push_back(result.elbo_trace.size());
        dropped = true;
      }
    }

    if (!dropped && has_prev &&
        (elbo - prev_elbo) < params.elbo_tol * std::abs(prev_elbo)) {
      result.converged = true;
      break;
    }
    if (gamma.cols() == 1 && !dropped && iter > 0) {
      result.converged = true;
      break;
    }
    prev_elbo = elbo;
    has_prev = !dropped;
  }

  result.responsibilities = gamma;
  result.labels.resize(static_cast<std::size_t>(t_count));
  for (Eigen::Index t = 0; t < t_count; ++t) {
    Eigen::Index best = 0;
    gamma.row(t).maxCoeff(&best);
    result.labels[static_cast<std::size_t>(t)] = static_cast<int>(best);
  }
  return result;
}

Annotation WindowLabelsToAnnotation(const EmbeddingSequence& seq,
                                    const std::vector<int>& labels,
                                    const std::string& label_prefix) {
  if (labels.size() != seq.windows.size()) {
    throw Error(ErrorCode::kLengthMismatch, "one label per window required");
  }
  std::vector<Turn> turns;
  const std::size_t n = seq.windows.size();
  for (std::size_t t = 0; t < n; ++t) {
    const Interval& w = seq.windows[t];
    double start = w.start;
    double end = w.end;
    if (t > 0 && seq.windows[t - 1].end > w.start) {
      const Interval& p = seq.windows[t - 1];
      start = 0.25 * (p.start + p.end + w.start + w.end);
    }
    if (t + 1 < n && seq.windows[t + 1].start < w.end) {
      const Interval& q = seq.windows[t + 1];
      end = 0.25 * (w.start + w.end + q.start + q.end);
    }
    if (end - start <= kTimeEpsilon) continue;
    turns.push_back({seq.recording_id, label_prefix + std::to_string(labels[t]),
                     start, end - start});
  }
  return Annotation(seq.recording_id, std::move(turns));
}

Annotation DiarizeEmbeddings(const EmbeddingSequence& seq, const PldaModel& plda,
                             double ahc_threshold, const VbxParams& params,
                             const std::string& label_prefix) {
  if (seq.size() == 0) return Annotation(seq.recording_id);
  const std::vector<int> init = Ahc(PldaLlrMatrix(plda, seq.vectors), ahc_threshold);
  const VbxResult result = VbxCluster(seq, plda, init, params);
  return WindowLabelsToAnnotation(seq, result.labels, label_prefix);
}

}  // namespace dforge
