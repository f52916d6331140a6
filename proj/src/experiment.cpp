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

#include "dgt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "dgt/engine.hpp"
#include "dgt/error.hpp"
#include "dgt/simnet.hpp"
#include "json.hpp"

namespace dgt {
namespace {

using nlohmann::json;

GraphTopology build_graph(const std::string& what, int vertices,
                          const std::filesystem::path& base_dir) {
  if (is_generator_name(what)) {
    return metropolis_weights(vertices, generated_edges(what, vertices));
  }
  std::filesystem::path path(what);
  if (path.is_relative()) path = base_dir / path;
  const EdgeList list = load_edge_list(path.string(), vertices);
  if (list.vertex_count != vertices) {
    throw TopologyError("edge list '" + what + "' has " +
                        std::to_string(list.vertex_count) +
                        " vertices, expected " + std::to_string(vertices));
  }
  return metropolis_weights(list);
}

GraphTopology build_inter(const RunConfig& cfg) {
  if (cfg.inter == "complete-uniform") return uniform_complete(cfg.clusters);
  return build_graph(cfg.inter, cfg.clusters, cfg.base_dir);
}

std::filesystem::path output_path(const std::filesystem::path& out_dir,
                                  const std::string& name) {
  const std::filesystem::path p(name);
  return p.is_absolute() ? p : out_dir / p;
}

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json optional_json(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

// Oracle NE: the linear solve when the game is affine, descent otherwise.
OracleSolution oracle_ne(const ClusterGameSpec& spec) {
  try {
    return solve_ne_linear(spec);
  } catch (const UnsupportedError&) {
    return solve_ne_descent(spec, 1e-10, 1000000);
  }
}

double max_own_error(const ClusterGameSpec& spec, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& ne) {
  double worst = 0.0;
  for (int i = 0; i < spec.cluster_count(); ++i) {
    const int off = spec.block_offset(i);
    const int qi = spec.strategy_dim(i);
    for (int j = 0; j < spec.cluster_size(i); ++j) {
      const auto row = x.row(spec.layout().global({i, j}));
      worst = std::max(worst, (row.segment(off, qi).transpose() -
                               ne.segment(off, qi)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace

std::string to_string(RunMode mode) {
  return mode == RunMode::kEngine ? "engine" : "simnet";
}

CompositeMixing build_mixing(const RunConfig& cfg) {
  GraphTopology inter = build_inter(cfg);
  std::vector<GraphTopology> intra;
  for (int i = 0; i < cfg.clusters; ++i) {
    intra.push_back(build_graph(cfg.intra_for(i), cfg.sizes[i], cfg.base_dir));
  }
  return compose_adjacency(inter, std::move(intra));
}

ExperimentSetup build_experiment(const RunConfig& cfg) {
  auto mixing = std::make_shared<const CompositeMixing>(build_mixing(cfg));
  std::shared_ptr<const ClusterGameSpec> spec;
  if (cfg.game_kind == "cournot") {
    spec = std::make_shared<const ClusterGameSpec>(
        build_cournot(cfg.cournot, mixing->inter()));
  } else {
    spec = std::make_shared<const ClusterGameSpec>(
        random_monotone_game(cfg.sizes, cfg.dims, cfg.game_seed));
  }
  return {spec, mixing};
}

BoundReport compute_bound(const ExperimentSetup& setup) {
  BoundReport out;
  out.constants = gain_constants(*setup.mixing, setup.spec->constants());
  out.bound = max_step(out.constants);
  out.rho_at_half_step =
      spectral_radius_3x3(phi_matrix(0.5 * out.bound.max_step, out.constants));
  return out;
}

ExperimentReport run_experiment(const RunConfig& cfg, RunMode mode,
                                const std::filesystem::path& out_dir) {
  const ExperimentSetup setup = build_experiment(cfg);
  const ClusterGameSpec& spec = *setup.spec;

  ExperimentReport report;
  report.mode = mode;
  std::optional<BoundReport> bound;
  try {
    bound = compute_bound(setup);
  } catch (const PreconditionError&) {
    if (!cfg.alpha) throw;  // auto needs the bound
  }
  if (bound) {
    report.alpha_star = bound->bound.alpha_star.value;
    report.max_step = bound->bound.max_step;
  }
  report.alpha_auto = !cfg.alpha.has_value();
  report.alpha_used = cfg.alpha ? *cfg.alpha : 0.5 * bound->bound.max_step;

  const OracleSolution ne = oracle_ne(spec);
  report.ne = ne.point.values();
  report.oracle_method = ne.method;
  report.oracle_residual = ne.residual;

  const Eigen::MatrixXd x0 =
      random_estimates(spec, cfg.seed, cfg.init_low, cfg.init_high);
  const StopCriteria stop{cfg.max_iters, cfg.residual_tol};

  std::filesystem::create_directories(out_dir.empty() ? "." : out_dir);
  report.trace_path = output_path(out_dir, cfg.trace_path);
  report.report_path = output_path(out_dir, cfg.report_path);

  auto finish = [&](const ConvergenceTrace& trace, const Eigen::MatrixXd& x,
                    const Eigen::VectorXd& avg) {
    trace.save_csv(report.trace_path.string());
    report.iterations = trace.back().iter;
    report.final_residual = trace.back().ne_residual;
    report.empirical_rate = trace.empirical_rate();
    report.dgt_final = avg;
    report.max_abs_error = max_own_error(spec, x, report.ne);
    if (report.status.empty()) {
      report.status =
          report.final_residual <= cfg.residual_tol ? "converged" : "max_iters";
    }
  };

  if (mode == RunMode::kEngine) {
    DgtEngine engine(setup.spec, setup.mixing, x0);
    engine.set_reference(ne.point);
    try {
      engine.run(report.alpha_used, stop);
    } catch (const DivergenceError& e) {
      report.status = "diverged";
      report.divergence_message = e.what();
    }
    finish(engine.trace(), engine.estimates(), engine.pi_average());
  } else {
    Network net = spawn_network(setup.spec, setup.mixing, x0);
    net.set_reference(ne.point);
    try {
      net.run(report.alpha_used, stop);
    } catch (const DivergenceError& e) {
      report.status = "diverged";
      report.divergence_message = e.what();
    }
    const Eigen::MatrixXd x = net.estimates();
    finish(net.trace(), x, (setup.mixing->pi().transpose() * x).transpose());
  }

  std::ofstream out(report.report_path);
  if (!out) throw IoError("cannot write '" + report.report_path.string() + "'");
  out << report_json(report) << "\n";
  if (!out) throw IoError("failed while writing '" + report.report_path.string() + "'");
  return report;
}

std::string report_json(const ExperimentReport& r) {
  json j;
  j["ne"] = vector_json(r.ne);
  j["dgt_final"] = vector_json(r.dgt_final);
  j["max_abs_error"] = std::isfinite(r.max_abs_error) ? json(r.max_abs_error)
                                                      : json(nullptr);
  j["empirical_rate"] = optional_json(r.empirical_rate);
  j["alpha_used"] = r.alpha_used;
  j["alpha_auto"] = r.alpha_auto;
  j["alpha_star"] = optional_json(r.alpha_star);
  j["max_step"] = optional_json(r.max_step);
  j["iterations"] = r.iterations;
  j["final_residual"] = std::isfinite(r.final_residual) ? json(r.final_residual)
                                                        : json(nullptr);
  j["status"] = r.status;
  if (!r.divergence_message.empty()) j["message"] = r.divergence_message;
  j["mode"] = to_string(r.mode);
  j["oracle"] = {{"method", to_string(r.oracle_method)},
                 {"residual", r.oracle_residual}};
  return j.dump(2);
}

std::string solve_ne_json(const RunConfig& cfg) {
  const ExperimentSetup setup = build_experiment(cfg);
  const OracleSolution ne = oracle_ne(*setup.spec);
  json clusters = json::array();
  for (int i = 0; i < setup.spec->cluster_count(); ++i) {
    clusters.push_back(vector_json(ne.point.block(*setup.spec, i)));
  }
  json j;
  j["clusters"] = clusters;
  j["residual"] = ne.residual;
  j["method"] = to_string(ne.method);
  if (ne.method == OracleMethod::kLinearSolve) {
    j["condition_number"] = ne.condition_number;
    j["ill_conditioned"] = ne.ill_conditioned();
  }
  return j.dump(2);
}

std::string compute_bound_json(const RunConfig& cfg) {
  const ExperimentSetup setup = build_experiment(cfg);
  const BoundReport b = compute_bound(setup);
  const GainConstants& c = b.constants;
  json j;
  j["sigma"] = c.sigma;
  j["sigma_max"] = c.sigma_max;
  j["lipschitz"] = c.lipschitz;
  j["mu1"] = c.mu1;
  j["mu2"] = c.mu2;
  j["alpha_star"] = b.bound.alpha_star.value;
  j["alpha_star_verified"] = b.bound.alpha_star.verified;
  j["bound_limited"] = b.bound.alpha_star.bound_limited;
  j["radicand_bound"] = b.bound.radicand_bound;
  j["max_step"] = b.bound.max_step;
  j["rho_at_half_bound"] = b.rho_at_half_step;
  return j.dump(2);
}

std::string validate_topology_json(const RunConfig& cfg) {
  const CompositeMixing mixing = build_mixing(cfg);
  json j;
  j["valid"] = true;
  j["clusters"] = mixing.cluster_count();
  j["agents"] = mixing.agent_count();
  j["sigma"] = mixing.sigma();
  j["sigma_max"] = mixing.sigma_max();
  j["cluster_sigmas"] = mixing.cluster_sigmas();
  j["pi_min"] = mixing.pi().minCoeff();
  j["pi_max"] = mixing.pi().maxCoeff();
  return j.dump(2);
}

}  // namespace dgt
