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

#include "dgt/dgt.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "dgt/config.hpp"
#include "dgt/engine.hpp"
#include "dgt/error.hpp"
#include "dgt/experiment.hpp"
#include "dgt/game.hpp"
#include "dgt/oracle.hpp"
#include "dgt/simnet.hpp"
#include "dgt/stepsize.hpp"
#include "dgt/topology.hpp"

struct dgt_graph {
  dgt::GraphTopology graph;
};
struct dgt_mixing {
  std::shared_ptr<const dgt::CompositeMixing> mixing;
};
struct dgt_game {
  std::shared_ptr<const dgt::ClusterGameSpec> spec;
};
struct dgt_engine {
  std::unique_ptr<dgt::DgtEngine> engine;
};
struct dgt_network {
  std::unique_ptr<dgt::Network> network;
};
struct dgt_config {
  dgt::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

// Thrown for bad arguments detected at the boundary.
struct InvalidArgument : std::runtime_error {
  using std::runtime_error::runtime_error;
};

dgt_status fail(dgt_status status, const std::string& what) {
  g_last_error = what;
  return status;
}

template <typename F>
dgt_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return DGT_OK;
  } catch (const dgt::Error& e) {
    return fail(static_cast<dgt_status>(e.code()), e.what());
  } catch (const InvalidArgument& e) {
    return fail(DGT_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DGT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DGT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DGT_ERR_INTERNAL, "unknown failure");
  }
}

template <typename T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw InvalidArgument(std::string(what) + " is null");
}

void require_len(size_t len, Eigen::Index expected, const char* what) {
  if (len != static_cast<size_t>(expected)) {
    throw InvalidArgument(std::string(what) + " needs length " +
                          std::to_string(expected) + ", got " +
                          std::to_string(len));
  }
}

void copy_out(const Eigen::MatrixXd& m, double* out) {
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>(out, m.rows(), m.cols()) = m;
}

void copy_out(const Eigen::VectorXd& v, double* out) {
  std::memcpy(out, v.data(), sizeof(double) * v.size());
}

Eigen::MatrixXd copy_in(const double* data, Eigen::Index rows,
                        Eigen::Index cols) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(data, rows, cols);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<int> int_vector(const int* data, int count, const char* what) {
  require(data, what);
  if (count <= 0) throw InvalidArgument("cluster count must be positive");
  return std::vector<int>(data, data + count);
}

Eigen::MatrixXd initial_estimates(const dgt::ClusterGameSpec& spec,
                                  const double* x0, uint64_t seed) {
  if (x0 == nullptr) return dgt::random_estimates(spec, seed);
  return copy_in(x0, spec.agent_count(), spec.total_dim());
}

}  // namespace

extern "C" {

const char* dgt_version(void) { return "1.0.0"; }

const char* dgt_last_error(void) { return g_last_error.c_str(); }

const char* dgt_status_name(dgt_status status) {
  switch (status) {
    case DGT_OK: return "ok";
    case DGT_ERR_DOMAIN: return "domain error";
    case DGT_ERR_TOPOLOGY: return "topology error";
    case DGT_ERR_CONFIG: return "config error";
    case DGT_ERR_DIVERGENCE: return "divergence";
    case DGT_ERR_PRECONDITION: return "precondition failure";
    case DGT_ERR_UNSUPPORTED: return "unsupported";
    case DGT_ERR_SINGULAR: return "singular system";
    case DGT_ERR_NO_CONVERGENCE: return "no convergence";
    case DGT_ERR_PROTOCOL: return "protocol error";
    case DGT_ERR_IO: return "io error";
    case DGT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DGT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void dgt_string_free(char* s) { delete[] s; }

// ---- graphs ----

dgt_status dgt_graph_from_weights(const double* weights, int n,
                                  dgt_graph** out) {
  return guarded([&] {
    require(weights, "weights");
    require(out, "out");
    if (n <= 0) throw dgt::DomainError("vertex count must be positive");
    *out = new dgt_graph{dgt::GraphTopology::from_weights(copy_in(weights, n, n))};
  });
}

dgt_status dgt_graph_metropolis(int n, const int* edges, size_t edge_count,
                                dgt_graph** out) {
  return guarded([&] {
    require(out, "out");
    if (edge_count > 0) require(edges, "edges");
    std::vector<dgt::Edge> list;
    for (size_t k = 0; k < edge_count; ++k) {
      list.push_back({edges[2 * k], edges[2 * k + 1]});
    }
    *out = new dgt_graph{dgt::metropolis_weights(n, list)};
  });
}

dgt_status dgt_graph_uniform_complete(int n, dgt_graph** out) {
  return guarded([&] {
    require(out, "out");
    *out = new dgt_graph{dgt::uniform_complete(n)};
  });
}

dgt_status dgt_graph_generated(const char* name, int n, dgt_graph** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new dgt_graph{dgt::metropolis_weights(n, dgt::generated_edges(name, n))};
  });
}

dgt_status dgt_graph_load_edge_list(const char* path, int min_vertices,
                                    dgt_graph** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new dgt_graph{
        dgt::metropolis_weights(dgt::load_edge_list(path, min_vertices))};
  });
}

int dgt_graph_vertex_count(const dgt_graph* g) {
  return g ? g->graph.vertex_count() : 0;
}

dgt_status dgt_graph_weights(const dgt_graph* g, double* out, size_t len) {
  return guarded([&] {
    require(g, "graph");
    require(out, "out");
    require_len(len, g->graph.weights().size(), "weights buffer");
    copy_out(g->graph.weights(), out);
  });
}

void dgt_graph_free(dgt_graph* g) { delete g; }

// ---- mixing ----

dgt_status dgt_mixing_compose(const dgt_graph* inter,
                              const dgt_graph* const* intra, int cluster_count,
                              dgt_mixing** out) {
  return guarded([&] {
    require(inter, "inter");
    require(intra, "intra");
    require(out, "out");
    if (cluster_count <= 0) throw InvalidArgument("cluster count must be positive");
    std::vector<dgt::GraphTopology> graphs;
    for (int i = 0; i < cluster_count; ++i) {
      require(intra[i], "intra graph");
      graphs.push_back(intra[i]->graph);
    }
    *out = new dgt_mixing{std::make_shared<const dgt::CompositeMixing>(
        dgt::compose_adjacency(inter->graph, std::move(graphs)))};
  });
}

int dgt_mixing_agent_count(const dgt_mixing* m) {
  return m ? m->mixing->agent_count() : 0;
}

int dgt_mixing_cluster_count(const dgt_mixing* m) {
  return m ? m->mixing->cluster_count() : 0;
}

dgt_status dgt_mixing_matrix(const dgt_mixing* m, double* out, size_t len) {
  return guarded([&] {
    require(m, "mixing");
    require(out, "out");
    require_len(len, m->mixing->matrix().size(), "matrix buffer");
    copy_out(m->mixing->matrix(), out);
  });
}

dgt_status dgt_mixing_pi(const dgt_mixing* m, double* out, size_t len) {
  return guarded([&] {
    require(m, "mixing");
    require(out, "out");
    require_len(len, m->mixing->pi().size(), "pi buffer");
    copy_out(m->mixing->pi(), out);
  });
}

dgt_status dgt_mixing_sigma(const dgt_mixing* m, double* sigma,
                            double* sigma_max) {
  return guarded([&] {
    require(m, "mixing");
    if (sigma) *sigma = m->mixing->sigma();
    if (sigma_max) *sigma_max = m->mixing->sigma_max();
  });
}

void dgt_mixing_free(dgt_mixing* m) { delete m; }

// ---- games ----

dgt_cournot_params dgt_cournot_defaults(void) {
  const dgt::CournotParams p;
  return {p.clusters, p.agents_per_cluster, p.quad_cost, p.lin_cost,
          p.price_intercept};
}

dgt_status dgt_game_cournot(const dgt_cournot_params* params,
                            const dgt_graph* inter, dgt_game** out) {
  return guarded([&] {
    require(params, "params");
    require(inter, "inter");
    require(out, "out");
    dgt::CournotParams p;
    p.clusters = params->clusters;
    p.agents_per_cluster = params->agents_per_cluster;
    p.quad_cost = params->quad_cost;
    p.lin_cost = params->lin_cost;
    p.price_intercept = params->price_intercept;
    *out = new dgt_game{std::make_shared<const dgt::ClusterGameSpec>(
        dgt::build_cournot(p, inter->graph))};
  });
}

dgt_status dgt_game_random_monotone(const int* sizes, const int* dims,
                                    int cluster_count, uint64_t seed,
                                    dgt_game** out) {
  return guarded([&] {
    require(out, "out");
    *out = new dgt_game{std::make_shared<const dgt::ClusterGameSpec>(
        dgt::random_monotone_game(int_vector(sizes, cluster_count, "sizes"),
                                  int_vector(dims, cluster_count, "dims"),
                                  seed))};
  });
}

dgt_status dgt_game_custom(const int* sizes, const int* dims,
                           int cluster_count, dgt_gradient_cb gradient,
                           void* user, dgt_game** out) {
  return guarded([&] {
    require(out, "out");
    if (gradient == nullptr) throw InvalidArgument("gradient callback is null");
    auto fn = [gradient, user](dgt::AgentId id, const Eigen::VectorXd& own,
                               const Eigen::VectorXd& estimates) {
      Eigen::VectorXd g(own.size());
      const int rc =
          gradient(id.cluster, id.agent, estimates.data(),
                   static_cast<int>(estimates.size()), g.data(),
                   static_cast<int>(g.size()), user);
      if (rc != 0) {
        throw dgt::DomainError("gradient callback failed with code " +
                               std::to_string(rc));
      }
      return g;
    };
    *out = new dgt_game{std::make_shared<const dgt::ClusterGameSpec>(
        int_vector(sizes, cluster_count, "sizes"),
        int_vector(dims, cluster_count, "dims"), fn)};
  });
}

dgt_status dgt_game_set_constants(dgt_game* game, double lipschitz, double mu1,
                                  double mu2) {
  return guarded([&] {
    require(game, "game");
    game->spec = std::make_shared<const dgt::ClusterGameSpec>(
        game->spec->with_constants({lipschitz, mu1, mu2}));
  });
}

dgt_status dgt_game_derive_constants(dgt_game* game) {
  return guarded([&] {
    require(game, "game");
    const dgt::GameConstants c = dgt::derive_quadratic_constants(*game->spec);
    game->spec = std::make_shared<const dgt::ClusterGameSpec>(
        game->spec->with_constants(c));
  });
}

dgt_status dgt_game_constants(const dgt_game* game, double* lipschitz,
                              double* mu1, double* mu2) {
  return guarded([&] {
    require(game, "game");
    const dgt::GameConstants& c = game->spec->constants();
    if (lipschitz) *lipschitz = c.lipschitz;
    if (mu1) *mu1 = c.mu1;
    if (mu2) *mu2 = c.mu2;
  });
}

int dgt_game_total_dim(const dgt_game* game) {
  return game ? game->spec->total_dim() : 0;
}

int dgt_game_agent_count(const dgt_game* game) {
  return game ? game->spec->agent_count() : 0;
}

void dgt_game_free(dgt_game* game) { delete game; }

// ---- oracle ----

dgt_status dgt_solve_ne_linear(const dgt_game* game, double* y, size_t len,
                               double* residual) {
  return guarded([&] {
    require(game, "game");
    require(y, "y");
    require_len(len, game->spec->total_dim(), "solution buffer");
    const dgt::OracleSolution s = dgt::solve_ne_linear(*game->spec);
    copy_out(s.point.values(), y);
    if (residual) *residual = s.residual;
  });
}

dgt_status dgt_solve_ne_descent(const dgt_game* game, double tol,
                                size_t max_iters, double* y, size_t len,
                                double* residual, size_t* iterations) {
  return guarded([&] {
    require(game, "game");
    require(y, "y");
    require_len(len, game->spec->total_dim(), "solution buffer");
    const dgt::OracleSolution s =
        dgt::solve_ne_descent(*game->spec, tol, max_iters);
    copy_out(s.point.values(), y);
    if (residual) *residual = s.residual;
    if (iterations) *iterations = s.iterations;
  });
}

// ---- step-size bound ----

dgt_status dgt_compute_step_bound(const dgt_mixing* mixing,
                                  const dgt_game* game, dgt_step_bound* out) {
  return guarded([&] {
    require(mixing, "mixing");
    require(game, "game");
    require(out, "out");
    const dgt::GainConstants c =
        dgt::gain_constants(*mixing->mixing, game->spec->constants());
    const dgt::StepBound b = dgt::max_step(c);
    out->sigma = c.sigma;
    out->sigma_max = c.sigma_max;
    out->alpha_star = b.alpha_star.value;
    out->radicand_bound = b.radicand_bound;
    out->max_step = b.max_step;
    out->alpha_star_verified = b.alpha_star.verified ? 1 : 0;
    out->bound_limited = b.alpha_star.bound_limited ? 1 : 0;
  });
}

dgt_status dgt_gain_matrix(const dgt_mixing* mixing, const dgt_game* game,
                           double alpha, double out[9]) {
  return guarded([&] {
    require(mixing, "mixing");
    require(game, "game");
    require(out, "out");
    const dgt::GainConstants c =
        dgt::gain_constants(*mixing->mixing, game->spec->constants());
    copy_out(Eigen::MatrixXd(dgt::phi_matrix(alpha, c)), out);
  });
}

dgt_status dgt_spectral_radius_3x3(const double m[9], double* out) {
  return guarded([&] {
    require(m, "matrix");
    require(out, "out");
    const Eigen::Matrix3d mat = copy_in(m, 3, 3);
    *out = dgt::spectral_radius_3x3(mat);
  });
}

// ---- engine ----

dgt_status dgt_engine_create(const dgt_game* game, const dgt_mixing* mixing,
                             const double* x0, uint64_t seed,
                             dgt_engine** out) {
  return guarded([&] {
    require(game, "game");
    require(mixing, "mixing");
    require(out, "out");
    auto engine = std::make_unique<dgt::DgtEngine>(
        game->spec, mixing->mixing, initial_estimates(*game->spec, x0, seed));
    *out = new dgt_engine{std::move(engine)};
  });
}

dgt_status dgt_engine_set_reference(dgt_engine* e, const double* y,
                                    size_t len) {
  return guarded([&] {
    require(e, "engine");
    require(y, "y");
    const dgt::ClusterGameSpec& spec = e->engine->spec();
    require_len(len, spec.total_dim(), "reference");
    e->engine->set_reference(dgt::ConsensualPoint(
        spec, Eigen::Map<const Eigen::VectorXd>(y, spec.total_dim())));
  });
}

dgt_status dgt_engine_step(dgt_engine* e, double alpha, int agentwise) {
  return guarded([&] {
    require(e, "engine");
    e->engine->step(alpha, agentwise ? dgt::StepMode::kAgentwise
                                     : dgt::StepMode::kCompact);
  });
}

dgt_status dgt_engine_run(dgt_engine* e, double alpha, size_t max_iters,
                          double residual_tol, dgt_run_summary* out) {
  return guarded([&] {
    require(e, "engine");
    const dgt::RunSummary s = e->engine->run(alpha, {max_iters, residual_tol});
    if (out) {
      out->iterations = s.iterations;
      out->converged = s.converged ? 1 : 0;
      out->final_residual = s.final_residual;
      out->empirical_rate = s.empirical_rate.value_or(
          std::numeric_limits<double>::quiet_NaN());
    }
  });
}

size_t dgt_engine_iteration(const dgt_engine* e) {
  return e ? e->engine->iteration() : 0;
}

dgt_status dgt_engine_estimates(const dgt_engine* e, double* out, size_t len) {
  return guarded([&] {
    require(e, "engine");
    require(out, "out");
    require_len(len, e->engine->estimates().size(), "estimate buffer");
    copy_out(e->engine->estimates(), out);
  });
}

dgt_status dgt_engine_average(const dgt_engine* e, double* out, size_t len) {
  return guarded([&] {
    require(e, "engine");
    require(out, "out");
    const Eigen::VectorXd avg = e->engine->pi_average();
    require_len(len, avg.size(), "average buffer");
    copy_out(avg, out);
  });
}

dgt_status dgt_engine_xi(const dgt_engine* e, const double* y, size_t len,
                         double out[3]) {
  return guarded([&] {
    require(e, "engine");
    require(y, "y");
    require(out, "out");
    const dgt::ClusterGameSpec& spec = e->engine->spec();
    require_len(len, spec.total_dim(), "reference");
    const dgt::XiMetrics xi = e->engine->xi_metrics(dgt::ConsensualPoint(
        spec, Eigen::Map<const Eigen::VectorXd>(y, spec.total_dim())));
    out[0] = xi.consensus;
    out[1] = xi.optimality;
    out[2] = xi.tracker;
  });
}

dgt_status dgt_engine_conservation(const dgt_engine* e, double* residual) {
  return guarded([&] {
    require(e, "engine");
    require(residual, "residual");
    *residual = e->engine->conservation_residual();
  });
}

dgt_status dgt_engine_write_trace(const dgt_engine* e, const char* path) {
  return guarded([&] {
    require(e, "engine");
    require(path, "path");
    e->engine->trace().save_csv(path);
  });
}

void dgt_engine_free(dgt_engine* e) { delete e; }

// ---- network ----

dgt_status dgt_network_create(const dgt_game* game, const dgt_mixing* mixing,
                              const double* x0, uint64_t seed, int threads,
                              dgt_network** out) {
  return guarded([&] {
    require(game, "game");
    require(mixing, "mixing");
    require(out, "out");
    dgt::NetworkOptions options;
    options.threads = threads;
    auto net = std::make_unique<dgt::Network>(dgt::spawn_network(
        game->spec, mixing->mixing, initial_estimates(*game->spec, x0, seed),
        options));
    *out = new dgt_network{std::move(net)};
  });
}

dgt_status dgt_network_round(dgt_network* net, double alpha) {
  return guarded([&] {
    require(net, "network");
    net->network->round(alpha);
  });
}

size_t dgt_network_rounds(const dgt_network* net) {
  return net ? net->network->rounds() : 0;
}

dgt_status dgt_network_estimates(const dgt_network* net, double* out,
                                 size_t len) {
  return guarded([&] {
    require(net, "network");
    require(out, "out");
    const Eigen::MatrixXd x = net->network->estimates();
    require_len(len, x.size(), "estimate buffer");
    copy_out(x, out);
  });
}

dgt_status dgt_network_write_trace(const dgt_network* net, const char* path) {
  return guarded([&] {
    require(net, "network");
    require(path, "path");
    net->network->trace().save_csv(path);
  });
}

void dgt_network_free(dgt_network* net) { delete net; }

// ---- configuration-driven experiments ----

dgt_status dgt_config_load(const char* path, dgt_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new dgt_config{dgt::load_config(path)};
  });
}

dgt_status dgt_config_parse(const char* text, const char* base_dir,
                            dgt_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    std::istringstream in(text);
    *out = new dgt_config{dgt::parse_config(in, base_dir ? base_dir : ".")};
  });
}

void dgt_config_free(dgt_config* cfg) { delete cfg; }

dgt_status dgt_run_experiment(const dgt_config* cfg, const char* mode,
                              const char* out_dir, char** report_json) {
  bool diverged = false;
  std::string message;
  const dgt_status status = guarded([&] {
    require(cfg, "config");
    const std::string m = mode ? mode : "engine";
    dgt::RunMode run_mode;
    if (m == "engine") {
      run_mode = dgt::RunMode::kEngine;
    } else if (m == "simnet") {
      run_mode = dgt::RunMode::kSimnet;
    } else {
      throw InvalidArgument("mode must be engine or simnet");
    }
    const dgt::ExperimentReport r =
        dgt::run_experiment(cfg->config, run_mode, out_dir ? out_dir : ".");
    if (report_json) *report_json = dup_string(dgt::report_json(r));
    diverged = r.diverged();
    message = r.divergence_message;
  });
  if (status == DGT_OK && diverged) return fail(DGT_ERR_DIVERGENCE, message);
  return status;
}

dgt_status dgt_solve_ne_json(const dgt_config* cfg, char** json) {
  return guarded([&] {
    require(cfg, "config");
    require(json, "json");
    *json = dup_string(dgt::solve_ne_json(cfg->config));
  });
}

dgt_status dgt_compute_bound_json(const dgt_config* cfg, char** json) {
  return guarded([&] {
    require(cfg, "config");
    require(json, "json");
    *json = dup_string(dgt::compute_bound_json(cfg->config));
  });
}

dgt_status dgt_validate_topology_json(const dgt_config* cfg, char** json) {
  return guarded([&] {
    require(cfg, "config");
    require(json, "json");
    *json = dup_string(dgt::validate_topology_json(cfg->config));
  });
}

}  // extern "C"
