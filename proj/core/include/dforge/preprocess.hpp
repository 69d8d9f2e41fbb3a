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

#include <optional>
#include <vector>

#include <Eigen/Core>

namespace dforge {

// Embedding preprocessing: centre, whiten, then an optional LDA projection.
//   y = lda_projection * whitener * (x - center)
struct Preprocessor {
  Eigen::VectorXd center;
  Eigen::MatrixXd whitener;        // D x D
  Eigen::MatrixXd lda_projection;  // D' x D
  // Set when the covariance had to be regularised during fitting.
  bool regularized = false;

  Eigen::Index input_dim() const { return center.size(); }
  Eigen::Index output_dim() const { return lda_projection.rows(); }

  // Rows are samples.
  Eigen::MatrixXd Apply(const Eigen::MatrixXd& embeddings) const;
};

// With labels, LDA keeps the `target_dim` most discriminative directions
// (target_dim == D is LDA without reduction). Without labels target_dim must
// equal D and the projection is the identity.
Preprocessor FitPreprocessor(const Eigen::MatrixXd& embeddings,
                             const std::optional<std::vector<int>>& labels,
                             Eigen::Index target_dim);

}  // namespace dforge
