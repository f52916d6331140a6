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

#include "dgt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dgt/error.hpp"
#include "dgt/linalg.hpp"

namespace dgt {
namespace {

Eigen::VectorXd averaged_map(const ClusterGameSpec& spec,
                             const Eigen::VectorXd& y) {
  Eigen::VectorXd g = cluster_gradient_sums(spec, y);
  for (int i = 0; i < spec.cluster_count(); ++i) {
    g.segment(spec.block_offset(i), spec.strategy_dim(i)) /=
        spec.cluster_size(i);
  }
  return g;
}

}  // namespace

std::string to_string(OracleMethod method) {
  return method == OracleMethod::kLinearSolve ? "linear_solve" : "descent";
}

OracleSolution solve_ne_linear(const ClusterGameSpec& spec) {
  const std::vector<AffineAgentModel> agents = probe_affine(spec);
  const ReducedAffineMap reduced = reduced_affine_map(spec, agents);
  const Eigen::MatrixXd& k = reduced.summed_jacobian;

  const double cond = condition_number(k);
  if (!std::isfinite(cond) || cond > 1e15) {
    throw SingularError("NE system is singular (condition number " +
                        std::to_string(cond) + ")");
  }
  const Eigen::VectorXd y =
      k.colPivHouseholderQr().solve(-reduced.summed_offset);
  ConsensualPoint point(spec, y);
  const double residual = ne_residual(spec, point);
  if (!(residual <= kOracleResidualTol)) {
    throw SingularError("linear NE solve left residual " +
                        std::to_string(residual));
  }
  return {point, residual, OracleMethod::kLinearSolve, cond, 0};
}

double probe_averaged_lipschitz(const ClusterGameSpec& spec,
                                const Eigen::VectorXd& at) {
  const int q = spec.total_dim();
  Eigen::MatrixXd jac(q, q);
  for (int k = 0; k < q; ++k) {
    const double h = 1e-6 * (1.0 + std::abs(at(k)));
    Eigen::VectorXd up = at, down = at;
    up(k) += h;
    down(k) -= h;
    jac.col(k) = (averaged_map(spec, up) - averaged_map(spec, down)) / (2 * h);
  }
  double lbar = spectral_norm(jac);

  std::mt19937_64 rng(0x11bULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    Eigen::VectorXd u(q), w(q);
    for (int k = 0; k < q; ++k) {
      u(k) = at(k) + normal(rng);
      w(k) = at(k) + normal(rng);
    }
    const double dist = (u - w).norm();
    if (dist > 0.0) {
      lbar = std::max(
          lbar, (averaged_map(spec, u) - averaged_map(spec, w)).norm() / dist);
    }
  }
  return lbar;
}

OracleSolution solve_ne_descent(const ClusterGameSpec& spec, double tol,
                                std::size_t max_iters,
                                std::optional<Eigen::VectorXd> start) {
  const double mu1 = spec.constants().mu1;
  if (!(tol > 0.0)) throw DomainError("descent tolerance must be positive");
  Eigen::VectorXd y =
      start ? *start : Eigen::VectorXd::Zero(spec.total_dim());
  if (y.size() != spec.total_dim()) {
    throw DomainError("descent start has the wrong dimension");
  }
  const double lbar = probe_averaged_lipschitz(spec, y);
  if (!(lbar > 0.0)) throw PreconditionError("averaged map is constant");
  const double eta = mu1 / (lbar * lbar);

  double residual = cluster_gradient_sums(spec, y).norm();
  std::size_t it = 0;
  while (residual > tol) {
    if (it == max_iters) {
      throw NoConvergenceError(
          residual, "descent oracle did not converge in " +
                        std::to_string(max_iters) + " iterations (residual " +
                        std::to_string(residual) + ")");
    }
    y -= eta * averaged_map(spec, y);
    residual = cluster_gradient_sums(spec, y).norm();
    ++it;
    if (!std::isfinite(residual)) {
      throw NoConvergenceError(residual, "descent oracle diverged");
    }
  }
  OracleSolution out{ConsensualPoint(spec, y), residual, OracleMethod::kDescent,
                     1.0, it};
  return out;
}

}  // namespace dgt
