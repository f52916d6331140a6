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

#include <map>
#include <memory>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "doctest.h"
#include "dgt/error.hpp"
#include "dgt/oracle.hpp"
#include "dgt/simnet.hpp"
#include "support/oracles.hpp"

namespace dgt {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Setup {
  std::shared_ptr<const ClusterGameSpec> spec;
  std::shared_ptr<const CompositeMixing> mixing;
};

Setup cournot_setup() {
  std::vector<GraphTopology> intra;
  for (int i = 0; i < 5; ++i) intra.push_back(metropolis_weights(20, ring_edges(20)));
  const GraphTopology inter = uniform_complete(5);
  return {std::make_shared<const ClusterGameSpec>(build_cournot({}, inter)),
          std::make_shared<const CompositeMixing>(compose_adjacency(inter, intra))};
}

Setup random_setup(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int m = 2 + static_cast<int>(rng() % 3);
  std::vector<int> sizes, dims;
  std::vector<GraphTopology> intra;
  for (int i = 0; i < m; ++i) {
    sizes.push_back(1 + static_cast<int>(rng() % 5));
    dims.push_back(1 + static_cast<int>(rng() % 2));
    const auto g = testing::random_connected_graph(sizes.back(), rng);
    std::vector<Edge> e;
    for (auto [a, b] : g.edges) e.push_back({a, b});
    intra.push_back(metropolis_weights(sizes.back(), e));
  }
  const GraphTopology inter = metropolis_weights(m, path_edges(m));
  return {std::make_shared<const ClusterGameSpec>(random_monotone_game(sizes, dims, seed)),
          std::make_shared<const CompositeMixing>(compose_adjacency(inter, intra))};
}

double tracker_distance(const std::vector<MatrixXd>& a, const std::vector<MatrixXd>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
  }
  return d;
}

TEST_CASE("cournot network has one process per agent") {
  const Setup s = cournot_setup();
  const Network net = spawn_network(s.spec, s.mixing, MatrixXd::Zero(100, 5));
  CHECK(net.agents().size() == 100);
  int with_inter = 0;
  for (const AgentProcess& a : net.agents()) {
    if (!a.inter_links().empty()) {
      ++with_inter;
      CHECK(a.is_representative());
      CHECK(a.inter_links().size() == 4);
    }
    CHECK(a.intra_links().size() == 2);
  }
  CHECK(with_inter == 5);
}

TEST_CASE("degenerate networks") {
  SUBCASE("a single agent") {
    auto spec = std::make_shared<const ClusterGameSpec>(build_quadratic_identity({1}, {1}));
    auto mix = std::make_shared<const CompositeMixing>(
        compose_adjacency(uniform_complete(1), {uniform_complete(1)}));
    Network net = spawn_network(spec, mix, MatrixXd::Constant(1, 1, 2.0));
    CHECK(net.agents().size() == 1);
    CHECK(net.agents()[0].intra_links().empty());
    CHECK(net.agents()[0].inter_links().empty());
    net.round(0.5);
    CHECK(net.estimates()(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("two singleton clusters talk only through the inter link") {
    auto spec = std::make_shared<const ClusterGameSpec>(build_quadratic_identity({1, 1}, {1, 1}));
    auto mix = std::make_shared<const CompositeMixing>(
        compose_adjacency(uniform_complete(2), {uniform_complete(1), uniform_complete(1)}));
    const Network net = spawn_network(spec, mix, MatrixXd::Zero(2, 2));
    for (const AgentProcess& a : net.agents()) {
      CHECK(a.intra_links().empty());
      CHECK(a.inter_links().size() == 1);
    }
  }
}

TEST_CASE("one round equals one agentwise engine step") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Setup s = random_setup(seed);
    const MatrixXd x0 = random_estimates(*s.spec, seed);
    DgtEngine engine(s.spec, s.mixing, x0);
    Network net = spawn_network(s.spec, s.mixing, x0);
    for (int t = 0; t < 3; ++t) {
      engine.step_agentwise(0.05);
      net.round(0.05);
      CHECK((engine.estimates() - net.estimates()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(tracker_distance(engine.trackers(), net.trackers()) <= 1e-12);
    }
  }
}

TEST_CASE("zero step is plain consensus mixing") {
  const Setup s = random_setup(4);
  const MatrixXd x0 = random_estimates(*s.spec, 11);
  Network net = spawn_network(s.spec, s.mixing, x0);
  net.round(0.0);
  CHECK((net.estimates() - s.mixing->matrix() * x0).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("long cournot runs track the engine") {
  const Setup s = cournot_setup();
  const MatrixXd x0 = random_estimates(*s.spec, 1);
  DgtEngine engine(s.spec, s.mixing, x0);
  Network net = spawn_network(s.spec, s.mixing, x0);
  for (int t = 0; t < 1000; ++t) {
    engine.step_agentwise(0.02);
    net.round(0.02);
  }
  CHECK((engine.estimates() - net.estimates()).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(tracker_distance(engine.trackers(), net.trackers()) <= 1e-9);
  CHECK(net.rounds() == 1000);
  CHECK(net.trace().size() == 1001);
}

TEST_CASE("reads follow the mixing sparsity") {
  const Setup s = random_setup(6);
  const MatrixXd x0 = random_estimates(*s.spec, 6);
  NetworkOptions opt;
  opt.log_reads = true;
  Network net = spawn_network(s.spec, s.mixing, x0, opt);
  net.round(0.05);
  net.round(0.05);
  const ClusterLayout& layout = s.mixing->layout();
  const MatrixXd& a = s.mixing->matrix();

  std::map<std::pair<int, int>, int> estimate_reads;
  for (const ReadEvent& e : net.read_log()) {
    const int r = layout.global(e.reader);
    const int c = layout.global(e.sender);
    CHECK(r != c);
    if (e.tracker) {
      CHECK(e.reader.cluster == e.sender.cluster);
      CHECK(s.mixing->intra(e.reader.cluster).weight(e.reader.agent, e.sender.agent) > 0.0);
    } else {
      CHECK(a(r, c) > 0.0);
      if (e.round == 1) ++estimate_reads[{r, c}];
    }
    if (e.reader.cluster != e.sender.cluster) {
      CHECK(e.reader.is_representative());
      CHECK(e.sender.is_representative());
    }
  }
  // Every off-diagonal weight is consumed exactly once per round.
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) {
      if (r == c || a(r, c) == 0.0) continue;
      CHECK(estimate_reads[{r, c}] == 1);
    }
  }
}

TEST_CASE("protocol violations") {
  const Setup s = random_setup(2);
  const ClusterLayout& layout = s.mixing->layout();
  Mailbox box(layout);
  const AgentId a{0, 0}, b{1, 0};
  CHECK_THROWS_AS(box.estimate(a, b), ProtocolError);
  box.post({b, VectorXd::Zero(s.spec->total_dim()), VectorXd::Zero(s.spec->strategy_dim(1))});
  CHECK(box.has(b));
  CHECK_NOTHROW(box.estimate(a, b));
  CHECK_THROWS_AS(box.tracker(a, b), ProtocolError);
  CHECK_THROWS_AS(
      box.post({b, VectorXd::Zero(s.spec->total_dim()), VectorXd::Zero(1)}),
      ProtocolError);
  box.clear();
  CHECK_FALSE(box.has(b));

  // An agent whose neighbor stayed silent cannot update.
  AgentProcess p({0, 0}, s.spec, 0.5, {}, 0.5, {{1, 0.5}},
                 VectorXd::Zero(s.spec->total_dim()));
  box.post(p.publish());
  CHECK_THROWS_AS(p.update(box, 0.1), ProtocolError);

  // Only representatives may hold inter-cluster links.
  if (s.spec->cluster_size(0) > 1) {
    CHECK_THROWS_AS(AgentProcess({0, 1}, s.spec, 0.5, {}, 0.5, {{1, 0.5}},
                                 VectorXd::Zero(s.spec->total_dim())),
                    TopologyError);
  } else {
    CHECK_THROWS_AS(AgentProcess({1, 1}, s.spec, 0.5, {}, 0.5, {{0, 0.5}},
                                 VectorXd::Zero(s.spec->total_dim())),
                    TopologyError);
  }
}

TEST_CASE("runs are deterministic and thread-count independent") {
  const Setup s = cournot_setup();
  const MatrixXd x0 = random_estimates(*s.spec, 3);
  Network one = spawn_network(s.spec, s.mixing, x0);
  Network again = spawn_network(s.spec, s.mixing, x0);
  NetworkOptions opt;
  opt.threads = 4;
  Network four = spawn_network(s.spec, s.mixing, x0, opt);
  for (int t = 0; t < 50; ++t) {
    one.round(0.02);
    again.round(0.02);
    four.round(0.02);
  }
  CHECK(one.estimates() == again.estimates());
  CHECK(one.estimates() == four.estimates());
  CHECK(tracker_distance(one.trackers(), four.trackers()) == 0.0);
}

TEST_CASE("network runs converge and detect divergence") {
  const Setup s = cournot_setup();
  Network net = spawn_network(s.spec, s.mixing, random_estimates(*s.spec, 1));
  net.set_reference(solve_ne_linear(*s.spec).point);
  const RunSummary sum = net.run(0.02, {30000, 1e-6});
  CHECK(sum.converged);
  CHECK(sum.final_residual <= 1e-6);
  CHECK(net.trace().back().optimality_gap < 1e-4);

  Network bad = spawn_network(s.spec, s.mixing, random_estimates(*s.spec, 1));
  CHECK_THROWS_AS(bad.run(2.0, {100000, 1e-6}), DivergenceError);

  Network net2 = spawn_network(s.spec, s.mixing, random_estimates(*s.spec, 1));
  CHECK_THROWS_AS(net2.round(-1.0), DomainError);
  CHECK_THROWS_AS(net2.run(0.0, {}), DomainError);
  NetworkOptions opt;
  opt.threads = 0;
  CHECK_THROWS_AS(spawn_network(s.spec, s.mixing, random_estimates(*s.spec, 1), opt),
                  DomainError);
  CHECK_THROWS_AS(spawn_network(s.spec, s.mixing, MatrixXd::Zero(3, 5)), DomainError);
}

}  // namespace
}  // namespace dgt
