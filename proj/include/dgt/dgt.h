/* Copyright 2026 The DGT Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the distributed gradient-tracking NE library.
 *
 * Every function returns a dgt_status. On failure the message is available
 * from dgt_last_error() on the calling thread until the next call. Objects are
 * opaque handles released with the matching *_free function; freeing NULL is
 * a no-op. Matrices are row-major. Strings returned through char** are owned
 * by the caller and released with dgt_string_free.
 */

#ifndef DGT_DGT_H_
#define DGT_DGT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(DGT_BUILDING_LIBRARY)
#define DGT_API __attribute__((visibility("default")))
#else
#define DGT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dgt_status {
  DGT_OK = 0,
  DGT_ERR_DOMAIN = 1,
  DGT_ERR_TOPOLOGY = 2,
  DGT_ERR_CONFIG = 3,
  DGT_ERR_DIVERGENCE = 4,
  DGT_ERR_PRECONDITION = 5,
  DGT_ERR_UNSUPPORTED = 6,
  DGT_ERR_SINGULAR = 7,
  DGT_ERR_NO_CONVERGENCE = 8,
  DGT_ERR_PROTOCOL = 9,
  DGT_ERR_IO = 10,
  DGT_ERR_INVALID_ARGUMENT = 20,
  DGT_ERR_INTERNAL = 99
} dgt_status;

typedef struct dgt_graph dgt_graph;
typedef struct dgt_mixing dgt_mixing;
typedef struct dgt_game dgt_game;
typedef struct dgt_engine dgt_engine;
typedef struct dgt_network dgt_network;
typedef struct dgt_config dgt_config;

DGT_API const char* dgt_version(void);
DGT_API const char* dgt_last_error(void);
DGT_API const char* dgt_status_name(dgt_status status);
DGT_API void dgt_string_free(char* s);

/* ---- graphs ---- */

/* Validates a doubly stochastic, connected weight matrix (n x n). */
DGT_API dgt_status dgt_graph_from_weights(const double* weights, int n,
                                          dgt_graph** out);
/* Metropolis weights on an undirected edge list of `edge_count` (u, v)
 * pairs stored flat in `edges`. */
DGT_API dgt_status dgt_graph_metropolis(int n, const int* edges,
                                        size_t edge_count, dgt_graph** out);
DGT_API dgt_status dgt_graph_uniform_complete(int n, dgt_graph** out);
/* name: ring, path, star or complete; Metropolis weights. */
DGT_API dgt_status dgt_graph_generated(const char* name, int n,
                                       dgt_graph** out);
DGT_API dgt_status dgt_graph_load_edge_list(const char* path, int min_vertices,
                                            dgt_graph** out);
DGT_API int dgt_graph_vertex_count(const dgt_graph* g);
DGT_API dgt_status dgt_graph_weights(const dgt_graph* g, double* out,
                                     size_t len);
DGT_API void dgt_graph_free(dgt_graph* g);

/* ---- composite mixing ---- */

DGT_API dgt_status dgt_mixing_compose(const dgt_graph* inter,
                                      const dgt_graph* const* intra,
                                      int cluster_count, dgt_mixing** out);
DGT_API int dgt_mixing_agent_count(const dgt_mixing* m);
DGT_API int dgt_mixing_cluster_count(const dgt_mixing* m);
DGT_API dgt_status dgt_mixing_matrix(const dgt_mixing* m, double* out,
                                     size_t len);
DGT_API dgt_status dgt_mixing_pi(const dgt_mixing* m, double* out, size_t len);
DGT_API dgt_status dgt_mixing_sigma(const dgt_mixing* m, double* sigma,
                                    double* sigma_max);
DGT_API void dgt_mixing_free(dgt_mixing* m);

/* ---- games ---- */

typedef struct dgt_cournot_params {
  int clusters;
  int agents_per_cluster;
  double quad_cost;
  double lin_cost;
  double price_intercept;
} dgt_cournot_params;

/* Defaults: 5 clusters of 20 agents, costs 5 and 5, intercept 60. */
DGT_API dgt_cournot_params dgt_cournot_defaults(void);

/* Partial gradient of agent (cluster, agent), both 0-based, evaluated on its
 * q-dimensional estimate row. Writes q_cluster values to `grad`. Nonzero
 * return aborts the computation with DGT_ERR_DOMAIN. */
typedef int (*dgt_gradient_cb)(int cluster, int agent, const double* estimate,
                               int q, double* grad, int grad_len,
                               void* user);

DGT_API dgt_status dgt_game_cournot(const dgt_cournot_params* params,
                                    const dgt_graph* inter, dgt_game** out);
DGT_API dgt_status dgt_game_random_monotone(const int* sizes, const int* dims,
                                            int cluster_count, uint64_t seed,
                                            dgt_game** out);
/* Game from a callback. The callback and `user` must outlive the handle and
 * every engine or network built from it; it may be called concurrently. */
DGT_API dgt_status dgt_game_custom(const int* sizes, const int* dims,
                                   int cluster_count, dgt_gradient_cb gradient,
                                   void* user, dgt_game** out);
/* Attaches L, mu1, mu2; or derives them when the game is affine. */
DGT_API dgt_status dgt_game_set_constants(dgt_game* game, double lipschitz,
                                          double mu1, double mu2);
DGT_API dgt_status dgt_game_derive_constants(dgt_game* game);
DGT_API dgt_status dgt_game_constants(const dgt_game* game, double* lipschitz,
                                      double* mu1, double* mu2);
DGT_API int dgt_game_total_dim(const dgt_game* game);
DGT_API int dgt_game_agent_count(const dgt_game* game);
DGT_API void dgt_game_free(dgt_game* game);

/* ---- oracle ---- */

DGT_API dgt_status dgt_solve_ne_linear(const dgt_game* game, double* y,
                                       size_t len, double* residual);
DGT_API dgt_status dgt_solve_ne_descent(const dgt_game* game, double tol,
                                        size_t max_iters, double* y,
                                        size_t len, double* residual,
                                        size_t* iterations);

/* ---- step-size bound ---- */

typedef struct dgt_step_bound {
  double sigma;
  double sigma_max;
  double alpha_star;
  double radicand_bound;
  double max_step;
  int alpha_star_verified;
  int bound_limited;
} dgt_step_bound;

DGT_API dgt_status dgt_compute_step_bound(const dgt_mixing* mixing,
                                          const dgt_game* game,
                                          dgt_step_bound* out);
DGT_API dgt_status dgt_gain_matrix(const dgt_mixing* mixing,
                                   const dgt_game* game, double alpha,
                                   double out[9]);
DGT_API dgt_status dgt_spectral_radius_3x3(const double m[9], double* out);

/* ---- engine ---- */

typedef struct dgt_run_summary {
  size_t iterations;
  int converged;
  double final_residual;
  double empirical_rate; /* NaN when undefined */
} dgt_run_summary;

/* x0 is n x q; NULL draws uniform [0, 1) entries from `seed`. */
DGT_API dgt_status dgt_engine_create(const dgt_game* game,
                                     const dgt_mixing* mixing,
                                     const double* x0, uint64_t seed,
                                     dgt_engine** out);
DGT_API dgt_status dgt_engine_set_reference(dgt_engine* e, const double* y,
                                            size_t len);
/* agentwise != 0 selects the per-agent update. */
DGT_API dgt_status dgt_engine_step(dgt_engine* e, double alpha, int agentwise);
DGT_API dgt_status dgt_engine_run(dgt_engine* e, double alpha,
                                  size_t max_iters, double residual_tol,
                                  dgt_run_summary* out);
DGT_API size_t dgt_engine_iteration(const dgt_engine* e);
DGT_API dgt_status dgt_engine_estimates(const dgt_engine* e, double* out,
                                        size_t len);
DGT_API dgt_status dgt_engine_average(const dgt_engine* e, double* out,
                                      size_t len);
/* (consensus, optimality, tracker) error against the reference point y. */
DGT_API dgt_status dgt_engine_xi(const dgt_engine* e, const double* y,
                                 size_t len, double out[3]);
DGT_API dgt_status dgt_engine_conservation(const dgt_engine* e,
                                           double* residual);
DGT_API dgt_status dgt_engine_write_trace(const dgt_engine* e,
                                          const char* path);
DGT_API void dgt_engine_free(dgt_engine* e);

/* ---- message-passing network ---- */

DGT_API dgt_status dgt_network_create(const dgt_game* game,
                                      const dgt_mixing* mixing,
                                      const double* x0, uint64_t seed,
                                      int threads, dgt_network** out);
DGT_API dgt_status dgt_network_round(dgt_network* net, double alpha);
DGT_API size_t dgt_network_rounds(const dgt_network* net);
DGT_API dgt_status dgt_network_estimates(const dgt_network* net, double* out,
                                         size_t len);
DGT_API dgt_status dgt_network_write_trace(const dgt_network* net,
                                           const char* path);
DGT_API void dgt_network_free(dgt_network* net);

/* ---- configuration-driven experiments ---- */

DGT_API dgt_status dgt_config_load(const char* path, dgt_config** out);
DGT_API dgt_status dgt_config_parse(const char* text, const char* base_dir,
                                    dgt_config** out);
DGT_API void dgt_config_free(dgt_config* cfg);

/* mode: "engine" or "simnet". Writes the trace and report under out_dir and
 * returns the report JSON. A divergent run still writes both files and
 * returns DGT_ERR_DIVERGENCE with the report filled in. */
DGT_API dgt_status dgt_run_experiment(const dgt_config* cfg, const char* mode,
                                      const char* out_dir, char** report_json);
DGT_API dgt_status dgt_solve_ne_json(const dgt_config* cfg, char** json);
DGT_API dgt_status dgt_compute_bound_json(const dgt_config* cfg, char** json);
DGT_API dgt_status dgt_validate_topology_json(const dgt_config* cfg,
                                              char** json);

#ifdef __cplusplus
}
#endif

#endif /* DGT_DGT_H_ */
