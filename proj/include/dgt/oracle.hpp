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

#ifndef DGT_ORACLE_HPP_
#define DGT_ORACLE_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>

#include "dgt/game.hpp"

namespace dgt {

// Centralised NE computation in the reduced consensual coordinates.

enum class OracleMethod { kLinearSolve, kDescent };

std::string to_string(OracleMethod method);

// A returned solution always has residual <= kOracleResidualTol.
inline constexpr double kOracleResidualTol = 1e-8;
// Conditioning above this is reported as a warning, not an error.
inline constexpr double kIllConditioned = 1e10;

struct OracleSolution {
  ConsensualPoint point;
  double residual = 0.0;
  OracleMethod method = OracleMethod::kLinearSolve;
  double condition_number = 1.0;  // linear solve only
  std::size_t iterations = 0;     // descent only
  bool ill_conditioned() const { return condition_number > kIllConditioned; }
};

// Solves sum_j grad_i f_ij(y) = 0 for all i as a q x q linear system built by
// probing the (affine) game. Throws SingularError when the system has no
// unique solution.
OracleSolution solve_ne_linear(const ClusterGameSpec& spec);

// Fixed-step descent y <- y - eta * col_i(mean_j grad_i f_ij(y)) with
// eta = mu1 / Lbar^2, Lbar probed numerically. Throws NoConvergenceError
// after max_iters.
OracleSolution solve_ne_descent(const ClusterGameSpec& spec, double tol,
                                std::size_t max_iters,
                                std::optional<Eigen::VectorXd> start = {});

// Lipschitz estimate of the cluster-averaged map around `at`: spectral norm
// of a central-difference Jacobian, raised to the largest secant ratio seen
// over a few random pairs.
double probe_averaged_lipschitz(const ClusterGameSpec& spec,
                                const Eigen::VectorXd& at);

}  // namespace dgt

#endif  // DGT_ORACLE_HPP_
