// Copyright 2026 The DGT Authors. All rights reserved.
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

#ifndef DGT_LINALG_HPP_
#define DGT_LINALG_HPP_

#include <Eigen/Dense>

namespace dgt {

// Dense helpers shared by the topology, game and step-size modules. All of
// them work on small matrices (a few hundred rows at most).

// Largest singular value, from the eigen-decomposition of the smaller Gram
// matrix.
double spectral_norm(const Eigen::MatrixXd& m);

// Smallest eigenvalue of (m + m^T) / 2. m must be square.
double min_symmetric_eigenvalue(const Eigen::MatrixXd& m);

// Ratio of extreme singular values; +inf for a singular matrix.
double condition_number(const Eigen::MatrixXd& m);

bool all_finite(const Eigen::MatrixXd& m);

}  // namespace dgt

#endif  // DGT_LINALG_HPP_
