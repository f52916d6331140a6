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

#include "dgt/game.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <utility>

#include "dgt/error.hpp"
#include "dgt/linalg.hpp"

namespace dgt {
namespace {

void check_agent(const ClusterGameSpec& spec, AgentId id) {
  if (id.cluster < 0 || id.cluster >= spec.cluster_count() || id.agent < 0 ||
      id.agent >= spec.cluster_size(id.cluster)) {
    throw DomainError("agent (" + std::to_string(id.cluster) + "," +
                      std::to_string(id.agent) + ") out of range");
  }
}

// Additivity tolerance for the affine probe.
constexpr double kAffineTol = 1e-9;

}  // namespace

ClusterGameSpec::ClusterGameSpec(std::vector<int> cluster_sizes,
                                 std::vector<int> strategy_dims,
                                 GradientFn gradient, PayoffFn payoff)
    : layout_(std::move(cluster_sizes)),
      dims_(std::move(strategy_dims)),
      gradient_(std::move(gradient)),
      payoff_(std::move(payoff)) {
  if (static_cast<int>(dims_.size()) != layout_.cluster_count()) {
    throw DomainError("one strategy dimension per cluster is required");
  }
  if (!gradient_) throw DomainError("gradient evaluator is empty");
  for (int i = 0; i < layout_.cluster_count(); ++i) {
    if (dims_[i] <= 0) throw DomainError("strategy dimensions must be positive");
    block_offsets_.push_back(total_dim_);
    total_dim_ += dims_[i];
    stacked_dim_ += layout_.size(i) * dims_[i];
  }
}

ClusterGameSpec ClusterGameSpec::with_constants(
    const GameConstants& constants) const {
  if (!(constants.lipschitz > 0.0) || !(constants.mu1 > 0.0) ||
      !(constants.mu2 > 0.0)) {
    throw DomainError("L, mu1 and mu2 must all be positive");
  }
  ClusterGameSpec out = *this;
  out.constants_ = constants;
  return out;
}

const GameConstants& ClusterGameSpec::constants() const {
  if (!constants_) {
    throw PreconditionError("game constants (L, mu1, mu2) are not available");
  }
  return *constants_;
}

Eigen::VectorXd ClusterGameSpec::gradient_at_row(
    AgentId id, const Eigen::VectorXd& estimates) const {
  const Eigen::VectorXd own =
      estimates.segment(block_offsets_[id.cluster], dims_[id.cluster]);
  return gradient_(id, own, estimates);
}

double ClusterGameSpec::payoff_at_row(AgentId id,
                                      const Eigen::VectorXd& estimates) const {
  if (!payoff_) throw UnsupportedError("game has no payoff evaluator");
  const Eigen::VectorXd own =
      estimates.segment(block_offsets_[id.cluster], dims_[id.cluster]);
  return payoff_(id, own, estimates);
}

ConsensualPoint::ConsensualPoint(const ClusterGameSpec& spec, Eigen::VectorXd y)
    : y_(std::move(y)) {
  if (y_.size() != spec.total_dim()) {
    throw DomainError("consensual point has dimension " +
                      std::to_string(y_.size()) + ", expected " +
                      std::to_string(spec.total_dim()));
  }
}

Eigen::VectorXd eval_local_gradient(const ClusterGameSpec& spec, AgentId id,
                                    const Eigen::VectorXd& own,
                                    const Eigen::VectorXd& estimates) {
  check_agent(spec, id);
  const int qi = spec.strategy_dim(id.cluster);
  if (own.size() != qi || estimates.size() != spec.total_dim()) {
    throw DomainError("gradient arguments have the wrong dimension");
  }
  if (estimates.segment(spec.block_offset(id.cluster), qi) != own) {
    throw DomainError("own-cluster block of the estimates must equal own");
  }
  Eigen::VectorXd g = spec.gradient_fn()(id, own, estimates);
  if (g.size() != qi) {
    throw DomainError("gradient evaluator returned dimension " +
                      std::to_string(g.size()));
  }
  return g;
}

Eigen::VectorXd game_mapping(const ClusterGameSpec& spec,
                             const ConsensualPoint& point) {
  Eigen::VectorXd out(spec.stacked_dim());
  Eigen::Index pos = 0;
  for (int i = 0; i < spec.cluster_count(); ++i) {
    const int qi = spec.strategy_dim(i);
    for (int j = 0; j < spec.cluster_size(i); ++j) {
      out.segment(pos, qi) = spec.gradient_at_row({i, j}, point.values());
      pos += qi;
    }
  }
  return out;
}

Eigen::VectorXd cluster_gradient_sums(const ClusterGameSpec& spec,
                                      const Eigen::VectorXd& point) {
  if (point.size() != spec.total_dim()) {
    throw DomainError("point has the wrong dimension");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(spec.total_dim());
  for (int i = 0; i < spec.cluster_count(); ++i) {
    auto block = out.segment(spec.block_offset(i), spec.strategy_dim(i));
    for (int j = 0; j < spec.cluster_size(i); ++j) {
      block += spec.gradient_at_row({i, j}, point);
    }
  }
  return out;
}

double ne_residual(const ClusterGameSpec& spec, const ConsensualPoint& point) {
  return cluster_gradient_sums(spec, point.values()).norm();
}

ClusterGameSpec build_cournot(const CournotParams& params,
                              const GraphTopology& inter_weights) {
  if (params.clusters <= 0 || params.agents_per_cluster <= 0) {
    throw DomainError("Cournot game needs positive cluster and agent counts");
  }
  if (inter_weights.vertex_count() != params.clusters) {
    throw DomainError("inter-cluster weights must be " +
                      std::to_string(params.clusters) + "x" +
                      std::to_string(params.clusters));
  }
  auto a0 = std::make_shared<const Eigen::MatrixXd>(inter_weights.weights());
  const CournotParams p = params;

  GradientFn gradient = [a0, p](AgentId id, const Eigen::VectorXd& own,
                                const Eigen::VectorXd& est) {
    const int i = id.cluster;
    const double index = i + 1.0;
    const double x = own(0);
    double g = 2.0 * p.quad_cost * x + p.lin_cost * index -
               p.price_intercept * index + 2.0 * (*a0)(i, i) * x;
    for (int h = 0; h < p.clusters; ++h) {
      if (h != i) g += (*a0)(i, h) * est(h);
    }
    return Eigen::VectorXd::Constant(1, g);
  };
  PayoffFn payoff = [a0, p](AgentId id, const Eigen::VectorXd& own,
                            const Eigen::VectorXd& est) {
    const int i = id.cluster;
    const double index = i + 1.0;
    const double x = own(0);
    double price = p.price_intercept * index - (*a0)(i, i) * x;
    for (int h = 0; h < p.clusters; ++h) {
      if (h != i) price -= (*a0)(i, h) * est(h);
    }
    const double cost = p.quad_cost * x * x + p.lin_cost * index * x + index;
    return cost - x * price;
  };

  ClusterGameSpec spec(std::vector<int>(p.clusters, p.agents_per_cluster),
                       std::vector<int>(p.clusters, 1), std::move(gradient),
                       std::move(payoff));
  return spec.with_constants(derive_quadratic_constants(spec));
}

ClusterGameSpec build_quadratic_identity(std::vector<int> cluster_sizes,
                                         std::vector<int> strategy_dims) {
  GradientFn gradient = [](AgentId, const Eigen::VectorXd& own,
                           const Eigen::VectorXd&) { return own; };
  PayoffFn payoff = [](AgentId, const Eigen::VectorXd& own,
                       const Eigen::VectorXd&) {
    return 0.5 * own.squaredNorm();
  };
  ClusterGameSpec spec(std::move(cluster_sizes), std::move(strategy_dims),
                       std::move(gradient), std::move(payoff));
  return spec.with_constants(derive_quadratic_constants(spec));
}

ClusterGameSpec build_affine_game(std::vector<int> cluster_sizes,
                                  std::vector<int> strategy_dims,
                                  std::vector<AffineAgentModel> agents) {
  const ClusterLayout layout(cluster_sizes);
  if (static_cast<int>(agents.size()) != layout.agent_count()) {
    throw DomainError("one affine model per agent is required");
  }
  if (strategy_dims.size() != cluster_sizes.size()) {
    throw DomainError("one strategy dimension per cluster is required");
  }
  int q = 0;
  for (int d : strategy_dims) q += d;
  for (int r = 0; r < layout.agent_count(); ++r) {
    const int qi = strategy_dims[layout.agent(r).cluster];
    if (agents[r].jacobian.rows() != qi || agents[r].jacobian.cols() != q ||
        agents[r].offset.size() != qi) {
      throw DomainError("affine model of agent row " + std::to_string(r) +
                        " has the wrong shape");
    }
  }
  auto models =
      std::make_shared<const std::vector<AffineAgentModel>>(std::move(agents));
  std::vector<int> row_offsets;
  for (int i = 0; i < layout.cluster_count(); ++i) {
    row_offsets.push_back(layout.offset(i));
  }
  GradientFn gradient = [models, row_offsets](AgentId id,
                                              const Eigen::VectorXd&,
                                              const Eigen::VectorXd& est) {
    const AffineAgentModel& a = (*models)[row_offsets[id.cluster] + id.agent];
    return Eigen::VectorXd(a.jacobian * est + a.offset);
  };
  ClusterGameSpec spec(std::move(cluster_sizes), std::move(strategy_dims),
                       std::move(gradient));
  return spec.with_constants(derive_quadratic_constants(spec));
}

ClusterGameSpec random_monotone_game(std::vector<int> cluster_sizes,
                                     std::vector<int> strategy_dims,
                                     std::uint64_t seed) {
  const ClusterLayout layout(cluster_sizes);
  if (strategy_dims.size() != cluster_sizes.size()) {
    throw DomainError("one strategy dimension per cluster is required");
  }
  std::vector<int> block_offsets;
  int q = 0;
  for (int d : strategy_dims) {
    if (d <= 0) throw DomainError("strategy dimensions must be positive");
    block_offsets.push_back(q);
    q += d;
  }
  const auto [n_min, n_max] =
      std::minmax_element(cluster_sizes.begin(), cluster_sizes.end());
  const double size_ratio = static_cast<double>(*n_max) / *n_min;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> margin(1.0, 3.0);

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(q, q);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(q, q);
  for (int r = 0; r < q; ++r) {
    for (int c = r + 1; c < q; ++c) {
      d(r, c) = d(c, r) = unit(rng);
      s(r, c) = unit(rng);
      s(c, r) = -s(r, c);
    }
  }
  for (int r = 0; r < q; ++r) {
    const double off = d.row(r).cwiseAbs().sum() + s.row(r).cwiseAbs().sum();
    d(r, r) = size_ratio * off + margin(rng);
  }
  const Eigen::MatrixXd target = d + s;
  Eigen::VectorXd target_offset(q);
  for (int r = 0; r < q; ++r) target_offset(r) = 5.0 * unit(rng);

  std::vector<AffineAgentModel> agents(layout.agent_count());
  for (int i = 0; i < layout.cluster_count(); ++i) {
    const int qi = strategy_dims[i];
    const int ni = cluster_sizes[i];
    const Eigen::MatrixXd rows = target.middleRows(block_offsets[i], qi);
    const Eigen::VectorXd c = target_offset.segment(block_offsets[i], qi);
    Eigen::MatrixXd jac_sum = Eigen::MatrixXd::Zero(qi, q);
    Eigen::VectorXd off_sum = Eigen::VectorXd::Zero(qi);
    for (int j = 0; j < ni; ++j) {
      Eigen::MatrixXd pj(qi, q);
      Eigen::VectorXd cj(qi);
      if (j + 1 < ni) {
        for (Eigen::Index k = 0; k < pj.size(); ++k) pj(k) = 0.5 * unit(rng);
        for (int k = 0; k < qi; ++k) cj(k) = unit(rng);
        jac_sum += pj;
        off_sum += cj;
      } else {
        pj = -jac_sum;
        cj = -off_sum;
      }
      agents[layout.offset(i) + j] = {rows + pj, c + cj};
    }
  }
  return build_affine_game(std::move(cluster_sizes), std::move(strategy_dims),
                           std::move(agents));
}

std::vector<AffineAgentModel> probe_affine(const ClusterGameSpec& spec) {
  const int q = spec.total_dim();
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);

  std::vector<AffineAgentModel> out;
  out.reserve(spec.agent_count());
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(q);
  for (int r = 0; r < spec.agent_count(); ++r) {
    const AgentId id = spec.layout().agent(r);
    const Eigen::VectorXd g0 = spec.gradient_at_row(id, zero);

    for (int trial = 0; trial < 3; ++trial) {
      Eigen::VectorXd u(q), w(q);
      for (int k = 0; k < q; ++k) {
        u(k) = coord(rng);
        w(k) = coord(rng);
      }
      const double a = coef(rng);
      const double b = coef(rng);
      const Eigen::VectorXd lhs = spec.gradient_at_row(id, a * u + b * w);
      const Eigen::VectorXd gu = spec.gradient_at_row(id, u);
      const Eigen::VectorXd gw = spec.gradient_at_row(id, w);
      const Eigen::VectorXd rhs = a * gu + b * gw + (1.0 - a - b) * g0;
      const double scale = 1.0 + std::max({lhs.cwiseAbs().maxCoeff(),
                                           gu.cwiseAbs().maxCoeff(),
                                           gw.cwiseAbs().maxCoeff(),
                                           g0.cwiseAbs().maxCoeff()});
      if ((lhs - rhs).cwiseAbs().maxCoeff() > kAffineTol * scale) {
        throw UnsupportedError(
            "game gradients are not affine; supply L, mu1 and mu2 explicitly");
      }
    }

    AffineAgentModel model;
    model.offset = g0;
    model.jacobian.resize(g0.size(), q);
    for (int k = 0; k < q; ++k) {
      model.jacobian.col(k) =
          spec.gradient_at_row(id, Eigen::VectorXd::Unit(q, k)) - g0;
    }
    out.push_back(std::move(model));
  }
  return out;
}

ReducedAffineMap reduced_affine_map(
    const ClusterGameSpec& spec, const std::vector<AffineAgentModel>& agents) {
  const int q = spec.total_dim();
  ReducedAffineMap out{Eigen::MatrixXd::Zero(q, q), Eigen::VectorXd::Zero(q),
                       Eigen::MatrixXd::Zero(q, q), Eigen::VectorXd::Zero(q)};
  for (int i = 0; i < spec.cluster_count(); ++i) {
    const int off = spec.block_offset(i);
    const int qi = spec.strategy_dim(i);
    for (int j = 0; j < spec.cluster_size(i); ++j) {
      const AffineAgentModel& a = agents[spec.layout().global({i, j})];
      out.summed_jacobian.middleRows(off, qi) += a.jacobian;
      out.summed_offset.segment(off, qi) += a.offset;
    }
    const double inv = 1.0 / spec.cluster_size(i);
    out.averaged_jacobian.middleRows(off, qi) =
        inv * out.summed_jacobian.middleRows(off, qi);
    out.averaged_offset.segment(off, qi) =
        inv * out.summed_offset.segment(off, qi);
  }
  return out;
}

GameConstants derive_quadratic_constants(const ClusterGameSpec& spec) {
  const std::vector<AffineAgentModel> agents = probe_affine(spec);
  GameConstants c;
  for (const auto& a : agents) {
    c.lipschitz = std::max(c.lipschitz, spectral_norm(a.jacobian));
  }
  const ReducedAffineMap reduced = reduced_affine_map(spec, agents);
  c.mu1 = min_symmetric_eigenvalue(reduced.averaged_jacobian);
  c.mu2 = min_symmetric_eigenvalue(reduced.summed_jacobian);
  if (!(c.mu1 > 0.0) || !(c.mu2 > 0.0)) {
    throw PreconditionError("game is not strongly monotone on the consensual "
                            "set (mu1=" + std::to_string(c.mu1) +
                            ", mu2=" + std::to_string(c.mu2) + ")");
  }
  if (!(c.lipschitz > 0.0)) {
    throw PreconditionError("game gradients are constant (L = 0)");
  }
  return c;
}

}  // namespace dgt
