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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "dgt/error.hpp"
#include "dgt/game.hpp"
#include "dgt/oracle.hpp"
#include "support/oracles.hpp"

namespace dgt {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

ClusterGameSpec cournot() { return build_cournot({}, uniform_complete(5)); }

ClusterGameSpec zero_game() {
  return ClusterGameSpec({2, 3}, {1, 2},
                         [](AgentId, const VectorXd& own, const VectorXd&) {
                           return VectorXd::Zero(own.size()).eval();
                         });
}

TEST_CASE("Cournot gradient at hand-computed points") {
  const ClusterGameSpec g = cournot();
  const VectorXd zero = VectorXd::Zero(5);
  CHECK(eval_local_gradient(g, {0, 0}, zero.segment(0, 1), zero)(0) ==
        doctest::Approx(-55.0));
  const VectorXd ones = VectorXd::Ones(5);
  CHECK(eval_local_gradient(g, {0, 0}, ones.segment(0, 1), ones)(0) ==
        doctest::Approx(-43.8));
  // Cluster c (1-based) at zero: 5c - 60c.
  for (int i = 0; i < 5; ++i) {
    CHECK(eval_local_gradient(g, {i, 7}, zero.segment(i, 1), zero)(0) ==
          doctest::Approx(-55.0 * (i + 1)));
  }
}

TEST_CASE("eval_local_gradient checks its arguments") {
  const ClusterGameSpec g = cournot();
  const VectorXd y = VectorXd::Ones(5);
  CHECK_THROWS_AS(eval_local_gradient(g, {5, 0}, y.segment(0, 1), y), DomainError);
  CHECK_THROWS_AS(eval_local_gradient(g, {0, 20}, y.segment(0, 1), y), DomainError);
  CHECK_THROWS_AS(eval_local_gradient(g, {0, 0}, y.segment(0, 2), y), DomainError);
  CHECK_THROWS_AS(eval_local_gradient(g, {0, 0}, y.segment(0, 1), y.head(4)),
                  DomainError);
  VectorXd own(1);
  own << 2.0;
  CHECK_THROWS_AS(eval_local_gradient(g, {0, 0}, own, y), DomainError);
}

TEST_CASE("quadratic identity game") {
  const ClusterGameSpec g = build_quadratic_identity({2, 1}, {2, 3});
  const VectorXd y = VectorXd::LinSpaced(5, -1, 3);
  CHECK(eval_local_gradient(g, {1, 0}, y.segment(2, 3), y).isApprox(y.segment(2, 3)));
  const VectorXd f = game_mapping(g, ConsensualPoint(g, y));
  REQUIRE(f.size() == g.stacked_dim());
  CHECK(f.segment(0, 2).isApprox(y.head(2)));
  CHECK(f.segment(2, 2).isApprox(y.head(2)));
  CHECK(f.segment(4, 3).isApprox(y.tail(3)));

  const GameConstants c = g.constants();
  CHECK(c.lipschitz == doctest::Approx(1.0));
  CHECK(c.mu1 == doctest::Approx(1.0));
  // The summed map is n_i times the identity on cluster i's block.
  CHECK(c.mu2 == doctest::Approx(1.0));

  const ClusterGameSpec singles = build_quadratic_identity({1, 1, 1}, {1, 1, 1});
  CHECK(singles.constants().mu1 == doctest::Approx(1.0));
  CHECK(singles.constants().mu2 == doctest::Approx(1.0));
  const ClusterGameSpec pairs = build_quadratic_identity({2, 3}, {1, 1});
  CHECK(pairs.constants().mu2 == doctest::Approx(2.0));
}

TEST_CASE("zero game") {
  const ClusterGameSpec g = zero_game();
  const ConsensualPoint p(g, VectorXd::Random(3));
  CHECK(game_mapping(g, p).isZero());
  CHECK(ne_residual(g, p) == 0.0);
}

TEST_CASE("Cournot residual at the origin") {
  const ClusterGameSpec g = cournot();
  const ConsensualPoint origin(g, VectorXd::Zero(5));
  CHECK(ne_residual(g, origin) ==
        doctest::Approx(20.0 * 55.0 * std::sqrt(55.0)).epsilon(1e-14));
}

TEST_CASE("Cournot equilibrium system and published values") {
  const ClusterGameSpec g = cournot();
  const std::vector<double> closed = testing::cournot_closed_form(5, 5, 5, 60);
  VectorXd y(5);
  for (int i = 0; i < 5; ++i) y(i) = closed[i];
  // 10.2 x_i + 0.2 sum x = 55 i
  for (int i = 0; i < 5; ++i) {
    CHECK(10.2 * y(i) + 0.2 * y.sum() == doctest::Approx(55.0 * (i + 1)));
  }
  const ConsensualPoint ne(g, y);
  CHECK(ne_residual(g, ne) <= 1e-6);
  const VectorXd sums = cluster_gradient_sums(g, y);
  CHECK(sums.norm() <= 1e-6);
  const double published[] = {3.9478, 9.3400, 14.7321, 20.1243, 25.5165};
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(y(i) - published[i]) < 5e-5);
  }
  // Average per cluster is zero at the NE.
  const VectorXd f = game_mapping(g, ne);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(f.segment(20 * i, 20).mean()) <= 1e-6);
}

TEST_CASE("Cournot constants from the affine structure") {
  const GameConstants c = cournot().constants();
  // Averaged reduced Jacobian: 2*5 + 2*0.2 = 10.4 on the diagonal, 0.2 off
  // it. Its eigenvalues are 10.2 (four times) and 11.2.
  MatrixXd avg = MatrixXd::Constant(5, 5, 0.2);
  avg.diagonal().setConstant(10.4);
  const VectorXd ev = testing::jacobi_eigenvalues(avg);
  CHECK(c.mu1 == doctest::Approx(ev(0)).epsilon(1e-10));
  CHECK(c.mu1 == doctest::Approx(10.2).epsilon(1e-10));
  CHECK(c.mu2 == doctest::Approx(20 * 10.2).epsilon(1e-10));
  // Per-agent Jacobian row: 10.4 on the own entry, 0.2 elsewhere.
  MatrixXd row = MatrixXd::Constant(1, 5, 0.2);
  row(0, 0) = 10.4;
  CHECK(c.lipschitz == doctest::Approx(testing::oracle_spectral_norm(row)).epsilon(1e-10));
  CHECK(c.lipschitz > 10.4);
  CHECK(c.lipschitz < 10.4 + 0.8);
}

TEST_CASE("Cournot gradient is affine") {
  const ClusterGameSpec g = cournot();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd x(5), y(5);
    for (int k = 0; k < 5; ++k) {
      x(k) = u(rng);
      y(k) = u(rng);
    }
    const double a = u(rng) / 10, b = u(rng) / 10;
    const int i = trial % 5;
    const AgentId id{i, trial % 20};
    const VectorXd mix = a * x + b * y;
    const double lhs = g.gradient_at_row(id, mix)(0);
    const double rhs = a * g.gradient_at_row(id, x)(0) +
                       b * g.gradient_at_row(id, y)(0) +
                       (1 - a - b) * g.gradient_at_row(id, VectorXd::Zero(5))(0);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * (1 + std::abs(lhs)));
  }
}

TEST_CASE("Cournot gradient matches finite differences of the payoff") {
  const ClusterGameSpec g = cournot();
  REQUIRE(g.has_payoff());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 30);
  for (int trial = 0; trial < 100; ++trial) {
    VectorXd x(5);
    for (int k = 0; k < 5; ++k) x(k) = u(rng);
    const AgentId id{trial % 5, trial % 20};
    const int i = id.cluster;
    auto f = [&](double own) {
      VectorXd row = x;
      row(i) = own;
      return g.payoff_at_row(id, row);
    };
    const double fd = testing::central_difference(f, x(i));
    const double grad = g.gradient_at_row(id, x)(0);
    CHECK(std::abs(fd - grad) <= 1e-5 * std::max(1.0, std::abs(grad)));
  }
}

TEST_CASE("scaled Cournot solves the scaled system") {
  CournotParams p;
  p.quad_cost = 10;
  p.lin_cost = 10;
  p.price_intercept = 60;
  const ClusterGameSpec g = build_cournot(p, uniform_complete(5));
  const OracleSolution s = solve_ne_linear(g);
  const std::vector<double> closed = testing::cournot_closed_form(5, 10, 10, 60);
  for (int i = 0; i < 5; ++i) CHECK(s.point.values()(i) == doctest::Approx(closed[i]));
  CHECK(s.residual <= 1e-10);
}

TEST_CASE("build_cournot validates its input") {
  CHECK_THROWS_AS(build_cournot({}, uniform_complete(4)), DomainError);
  CournotParams p;
  p.agents_per_cluster = 0;
  CHECK_THROWS_AS(build_cournot(p, uniform_complete(5)), DomainError);
}

TEST_CASE("spec invariants") {
  CHECK_THROWS_AS(build_quadratic_identity({}, {}), DomainError);
  CHECK_THROWS_AS(build_quadratic_identity({1, 0}, {1, 1}), DomainError);
  CHECK_THROWS_AS(build_quadratic_identity({1, 1}, {1}), DomainError);
  const ClusterGameSpec g = zero_game();
  CHECK(g.total_dim() == 3);
  CHECK(g.stacked_dim() == 2 * 1 + 3 * 2);
  CHECK(g.block_offset(1) == 1);
  CHECK_THROWS_AS(g.constants(), PreconditionError);
  CHECK_THROWS_AS(g.with_constants({1, 0, 1}), DomainError);
  CHECK(g.with_constants({2, 1, 1}).constants().lipschitz == 2.0);
  CHECK_THROWS_AS(ConsensualPoint(g, VectorXd::Zero(2)), DomainError);
}

TEST_CASE("non-affine games are rejected by the probe") {
  const ClusterGameSpec g({2}, {1}, [](AgentId, const VectorXd& own, const VectorXd&) {
    return own.array().cube().matrix().eval();
  });
  CHECK_THROWS_AS(derive_quadratic_constants(g), UnsupportedError);
  CHECK_THROWS_AS(probe_affine(g), UnsupportedError);
}

TEST_CASE("non-monotone affine games fail the precondition") {
  const ClusterGameSpec g({1, 1}, {1, 1}, [](AgentId id, const VectorXd&, const VectorXd& e) {
    VectorXd out(1);
    out << (id.cluster == 0 ? e(1) : e(0));
    return out;
  });
  CHECK_THROWS_AS(derive_quadratic_constants(g), PreconditionError);
}

TEST_CASE("random monotone games are strongly monotone") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ClusterGameSpec g = random_monotone_game({3, 1, 4}, {2, 1, 2}, seed);
    const GameConstants c = g.constants();
    CHECK(c.mu1 > 0);
    CHECK(c.mu2 > 0);
    CHECK(c.lipschitz > 0);
  }
  // Same seed, same game.
  const ClusterGameSpec a = random_monotone_game({2, 2}, {1, 1}, 5);
  const ClusterGameSpec b = random_monotone_game({2, 2}, {1, 1}, 5);
  const VectorXd y = VectorXd::Ones(2);
  CHECK(cluster_gradient_sums(a, y) == cluster_gradient_sums(b, y));
}

TEST_CASE("affine game round trip through the probe") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  std::vector<AffineAgentModel> agents;
  const std::vector<int> sizes = {2, 1};
  const std::vector<int> dims = {1, 2};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < sizes[i]; ++j) {
      AffineAgentModel a;
      a.jacobian = MatrixXd::Zero(dims[i], 3);
      for (Eigen::Index k = 0; k < a.jacobian.size(); ++k) a.jacobian(k) = normal(rng);
      a.offset = VectorXd::Zero(dims[i]);
      for (Eigen::Index k = 0; k < a.offset.size(); ++k) a.offset(k) = normal(rng);
      agents.push_back(a);
    }
  }
  const ClusterGameSpec g({2, 1}, {1, 2}, [agents](AgentId id, const VectorXd&, const VectorXd& e) {
    const int idx = id.cluster == 0 ? id.agent : 2;
    return (agents[idx].jacobian * e + agents[idx].offset).eval();
  });
  const std::vector<AffineAgentModel> probed = probe_affine(g);
  REQUIRE(probed.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK((probed[k].jacobian - agents[k].jacobian).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((probed[k].offset - agents[k].offset).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

}  // namespace
}  // namespace dgt
