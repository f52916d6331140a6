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
#include <vector>

#include "doctest.h"
#include "dgt/error.hpp"
#include "dgt/oracle.hpp"
#include "support/oracles.hpp"

namespace dgt {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Separable but non-affine: grad = 2 x + tanh(x) - c * cluster, shared by
// every agent of a cluster.
ClusterGameSpec tanh_game() {
  GradientFn g = [](AgentId id, const VectorXd& own, const VectorXd&) {
    VectorXd out = 2.0 * own + own.array().tanh().matrix();
    out.array() -= 1.0 + id.cluster;
    return out;
  };
  return ClusterGameSpec({2, 3}, {1, 2}, g).with_constants({3.0, 2.0, 4.0});
}

TEST_CASE("quadratic identity game has its equilibrium at the origin") {
  const ClusterGameSpec spec = build_quadratic_identity({2, 3}, {1, 2});
  const OracleSolution s = solve_ne_linear(spec);
  CHECK(s.method == OracleMethod::kLinearSolve);
  CHECK(s.point.values().norm() < 1e-14);
  CHECK(s.residual < 1e-14);
  CHECK(s.condition_number == doctest::Approx(3.0 / 2.0));
  CHECK_FALSE(s.ill_conditioned());
  CHECK(to_string(s.method) == "linear_solve");
}

TEST_CASE("cournot equilibrium matches the closed form") {
  const ClusterGameSpec spec = build_cournot({}, uniform_complete(5));
  const OracleSolution s = solve_ne_linear(spec);
  const std::vector<double> ref = testing::cournot_closed_form(5, 5.0, 5.0, 60.0);
  const double published[] = {3.9478, 9.3400, 14.7321, 20.1243, 25.5165};
  for (int i = 0; i < 5; ++i) {
    CHECK(s.point.values()(i) == doctest::Approx(ref[i]).epsilon(1e-12));
    CHECK(std::abs(s.point.values()(i) - published[i]) < 1e-4);
  }
  CHECK(s.residual <= kOracleResidualTol);
}

TEST_CASE("descent agrees with the linear solve") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ClusterGameSpec spec = random_monotone_game({2, 3, 1}, {1, 2, 2}, seed);
    const OracleSolution lin = solve_ne_linear(spec);
    const OracleSolution des = solve_ne_descent(spec, 1e-10, 1000000);
    CHECK(des.method == OracleMethod::kDescent);
    CHECK(des.residual <= 1e-10);
    CHECK((lin.point.values() - des.point.values()).norm() < 1e-6);
  }
  const ClusterGameSpec cournot = build_cournot({}, uniform_complete(5));
  const OracleSolution lin = solve_ne_linear(cournot);
  const OracleSolution des = solve_ne_descent(cournot, 1e-9, 1000000);
  CHECK((lin.point.values() - des.point.values()).norm() < 1e-6);
}

TEST_CASE("descent started at the equilibrium does not move") {
  const ClusterGameSpec spec = build_cournot({}, uniform_complete(5));
  const OracleSolution lin = solve_ne_linear(spec);
  const OracleSolution des =
      solve_ne_descent(spec, 1e-6, 10, lin.point.values());
  CHECK(des.iterations == 0);
  CHECK(des.point.values() == lin.point.values());
}

TEST_CASE("descent error decays geometrically") {
  const ClusterGameSpec spec = random_monotone_game({3, 2}, {2, 1}, 7);
  const std::size_t coarse = solve_ne_descent(spec, 1e-4, 1000000).iterations;
  const std::size_t fine = solve_ne_descent(spec, 1e-8, 1000000).iterations;
  const std::size_t finer = solve_ne_descent(spec, 1e-12, 1000000).iterations;
  REQUIRE(coarse > 0);
  // Each factor of 1e-4 in tolerance costs about the same number of steps.
  const double first = static_cast<double>(fine - coarse);
  const double second = static_cast<double>(finer - fine);
  CHECK(first > 0.0);
  CHECK(second == doctest::Approx(first).epsilon(0.25));
}

TEST_CASE("non-affine games fall to the descent path") {
  const ClusterGameSpec spec = tanh_game();
  CHECK_THROWS_AS(solve_ne_linear(spec), UnsupportedError);
  const OracleSolution s = solve_ne_descent(spec, 1e-10, 100000);
  CHECK(s.residual <= 1e-10);
  // Cluster 0: 2x + tanh(x) = 1 solved independently by bisection.
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (2 * mid + std::tanh(mid) < 1.0 ? lo : hi) = mid;
  }
  CHECK(s.point.values()(0) == doctest::Approx(lo).epsilon(1e-9));
}

TEST_CASE("descent failures") {
  const ClusterGameSpec spec = random_monotone_game({3, 2}, {2, 1}, 7);
  CHECK_THROWS_AS(solve_ne_descent(spec, 1e-12, 2), NoConvergenceError);
  CHECK_THROWS_AS(solve_ne_descent(spec, 0.0, 10), DomainError);
  CHECK_THROWS_AS(solve_ne_descent(spec, 1e-6, 10, VectorXd::Zero(2)), DomainError);
  // The step size needs mu1, which a bare spec does not carry.
  const ClusterGameSpec bare(
      {1}, {1}, [](AgentId, const VectorXd& own, const VectorXd&) { return own; });
  CHECK_THROWS_AS(solve_ne_descent(bare, 1e-6, 10), PreconditionError);
}

// Affine game assembled without the monotonicity checks of
// build_affine_game, so degenerate systems reach the oracle.
ClusterGameSpec raw_affine(const MatrixXd& jac, const VectorXd& offset) {
  GradientFn g = [jac, offset](AgentId id, const VectorXd&, const VectorXd& est) {
    VectorXd out(1);
    out(0) = jac.row(id.cluster).dot(est) + offset(id.cluster);
    return out;
  };
  return ClusterGameSpec({1, 1}, {1, 1}, g);
}

TEST_CASE("singular systems are rejected") {
  CHECK_THROWS_AS(solve_ne_linear(raw_affine(MatrixXd::Zero(2, 2), VectorXd::Ones(2))),
                  SingularError);
  // Rank one: both clusters respond only to the sum of strategies.
  VectorXd off(2);
  off << 0.0, 1.0;
  CHECK_THROWS_AS(solve_ne_linear(raw_affine(MatrixXd::Ones(2, 2), off)),
                  SingularError);
}

TEST_CASE("ill-conditioned systems are flagged but solved") {
  MatrixXd j(2, 2);
  j << 1.0, 0.0, 0.0, 1e-11;
  VectorXd off(2);
  off << -1.0, -1e-11;
  const OracleSolution s = solve_ne_linear(raw_affine(j, off));
  CHECK(s.ill_conditioned());
  CHECK(s.point.values()(0) == doctest::Approx(1.0));
  CHECK(s.point.values()(1) == doctest::Approx(1.0));
}

TEST_CASE("averaged lipschitz probe") {
  const ClusterGameSpec spec = build_quadratic_identity({2, 3}, {1, 2});
  CHECK(probe_averaged_lipschitz(spec, VectorXd::Zero(3)) ==
        doctest::Approx(1.0).epsilon(1e-6));
  const ClusterGameSpec cournot = build_cournot({}, uniform_complete(5));
  // Averaged Jacobian 10.2 I + 0.2 11^T is symmetric with top eigenvalue 11.2.
  CHECK(probe_averaged_lipschitz(cournot, VectorXd::Zero(5)) ==
        doctest::Approx(11.2).epsilon(1e-6));
}

}  // namespace
}  // namespace dgt
