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

#ifndef DGT_GAME_HPP_
#define DGT_GAME_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dgt/topology.hpp"

namespace dgt {

// Partial gradient of agent `id`'s payoff with respect to its own strategy.
// `own` has the cluster's strategy dimension; `estimates` is the agent's
// full q-dimensional view whose own-cluster block equals `own`. Evaluators
// must be pure: the engine and the simulator call them from several threads.
using GradientFn = std::function<Eigen::VectorXd(
    AgentId id, const Eigen::VectorXd& own, const Eigen::VectorXd& estimates)>;
using PayoffFn = std::function<double(AgentId id, const Eigen::VectorXd& own,
                                      const Eigen::VectorXd& estimates)>;

// Regularity constants consumed by the step-size theory: the largest
// per-agent Lipschitz constant and the strong-monotonicity constants of the
// cluster-averaged and cluster-summed maps on the consensual subspace.
struct GameConstants {
  double lipschitz = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
};

class ClusterGameSpec {
 public:
  ClusterGameSpec(std::vector<int> cluster_sizes, std::vector<int> strategy_dims,
                  GradientFn gradient, PayoffFn payoff = {});

  // Returns a copy carrying the given constants (validated positive).
  ClusterGameSpec with_constants(const GameConstants& constants) const;

  int cluster_count() const { return layout_.cluster_count(); }
  int agent_count() const { return layout_.agent_count(); }
  int cluster_size(int i) const { return layout_.size(i); }
  int strategy_dim(int i) const { return dims_[i]; }
  // Column offset of cluster i's block inside a q-dimensional estimate.
  int block_offset(int i) const { return block_offsets_[i]; }
  int total_dim() const { return total_dim_; }      // q
  int stacked_dim() const { return stacked_dim_; }  // N = sum n_i q_i
  const ClusterLayout& layout() const { return layout_; }
  const std::vector<int>& strategy_dims() const { return dims_; }

  bool has_constants() const { return constants_.has_value(); }
  // Throws PreconditionError when the constants were never supplied.
  const GameConstants& constants() const;
  bool has_payoff() const { return static_cast<bool>(payoff_); }

  // Unchecked evaluation on an agent's estimate row; own is sliced from it.
  Eigen::VectorXd gradient_at_row(AgentId id,
                                  const Eigen::VectorXd& estimates) const;
  double payoff_at_row(AgentId id, const Eigen::VectorXd& estimates) const;

  const GradientFn& gradient_fn() const { return gradient_; }
  const PayoffFn& payoff_fn() const { return payoff_; }

 private:
  ClusterLayout layout_;
  std::vector<int> dims_;
  std::vector<int> block_offsets_;
  int total_dim_ = 0;
  int stacked_dim_ = 0;
  GradientFn gradient_;
  PayoffFn payoff_;
  std::optional<GameConstants> constants_;
};

// Reduced coordinate of a point of the consensual set: one strategy block per
// cluster, stacked.
class ConsensualPoint {
 public:
  ConsensualPoint(const ClusterGameSpec& spec, Eigen::VectorXd y);

  const Eigen::VectorXd& values() const { return y_; }
  Eigen::VectorXd block(const ClusterGameSpec& spec, int cluster) const {
    return y_.segment(spec.block_offset(cluster), spec.strategy_dim(cluster));
  }

 private:
  Eigen::VectorXd y_;
};

Eigen::VectorXd eval_local_gradient(const ClusterGameSpec& spec, AgentId id,
                                    const Eigen::VectorXd& own,
                                    const Eigen::VectorXd& estimates);

// col over clusters and agents of each agent's partial gradient at the
// consensual point, length N.
Eigen::VectorXd game_mapping(const ClusterGameSpec& spec,
                             const ConsensualPoint& point);

// col over clusters of sum_j grad_i f_ij(point), length q.
Eigen::VectorXd cluster_gradient_sums(const ClusterGameSpec& spec,
                                      const Eigen::VectorXd& point);

// sqrt(sum_i ||sum_j grad_i f_ij(point)||^2); zero exactly at an NE.
double ne_residual(const ClusterGameSpec& spec, const ConsensualPoint& point);

struct CournotParams {
  int clusters = 5;
  int agents_per_cluster = 20;
  double quad_cost = 5.0;         // c_ij = quad x^2 + lin * i * x + i
  double lin_cost = 5.0;
  double price_intercept = 60.0;  // p_ij = intercept * i - sum_h a0_ih x_h1
};

// Cournot competition between father companies (clusters) whose subsidiaries
// (agents) cooperate. The own-cluster price term is charged on the agent's own
// quantity. Constants are derived and attached.
ClusterGameSpec build_cournot(const CournotParams& params,
                              const GraphTopology& inter_weights);

// f_ij = 0.5 ||x_ij||^2, gradient = own.
ClusterGameSpec build_quadratic_identity(std::vector<int> cluster_sizes,
                                         std::vector<int> strategy_dims);

// Per-agent affine gradient: grad = jacobian * estimates + offset, with the
// jacobian of shape q_i x q taken with respect to the full estimate row.
struct AffineAgentModel {
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd offset;
};

// Agents are listed in global row order.
ClusterGameSpec build_affine_game(std::vector<int> cluster_sizes,
                                  std::vector<int> strategy_dims,
                                  std::vector<AffineAgentModel> agents);

// Random affine game whose cluster-averaged map has Jacobian D + S with D
// diagonally dominant symmetric positive definite and S skew; agents within a
// cluster get zero-sum perturbations. Diagonal dominance is inflated by the
// cluster-size ratio so that the summed map is strongly monotone too.
ClusterGameSpec random_monotone_game(std::vector<int> cluster_sizes,
                                     std::vector<int> strategy_dims,
                                     std::uint64_t seed);

// Recovers the affine model of every agent by probing unit directions, after
// checking additivity at random points. Throws UnsupportedError otherwise.
std::vector<AffineAgentModel> probe_affine(const ClusterGameSpec& spec);

// Affine reduced maps on consensual points: y -> averaged_jacobian y +
// averaged_offset and the cluster-summed analogue.
struct ReducedAffineMap {
  Eigen::MatrixXd averaged_jacobian;
  Eigen::VectorXd averaged_offset;
  Eigen::MatrixXd summed_jacobian;
  Eigen::VectorXd summed_offset;
};
ReducedAffineMap reduced_affine_map(const ClusterGameSpec& spec,
                                    const std::vector<AffineAgentModel>& agents);

// L = max spectral norm of agent Jacobians; mu1, mu2 = smallest eigenvalue of
// the symmetric part of the averaged and summed reduced Jacobians. Throws
// UnsupportedError for non-affine games and PreconditionError when the game
// is not strongly monotone.
GameConstants derive_quadratic_constants(const ClusterGameSpec& spec);

}  // namespace dgt

#endif  // DGT_GAME_HPP_
