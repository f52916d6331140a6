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

#ifndef DGT_ENGINE_HPP_
#define DGT_ENGINE_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dgt/game.hpp"
#include "dgt/topology.hpp"

namespace dgt {

// Any NE residual above this aborts a run as divergent.
inline constexpr double kDivergenceResidual = 1e12;

struct TraceRecord {
  std::size_t iter = 0;
  double consensus_gap = 0.0;   // ||x - A_inf x||_F^pi
  double optimality_gap = 0.0;  // ||A_inf x - 1 x*^T||_F, NaN without x*
  double tracker_gap = 0.0;     // sum_i ||v_i - mean(v_i)||_F
  double ne_residual = 0.0;     // at the pi-weighted average point
};

class ConvergenceTrace {
 public:
  void append(const TraceRecord& r) { records_.push_back(r); }
  const std::vector<TraceRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  const TraceRecord& back() const { return records_.back(); }

  // CSV with header iter,consensus_gap,optimality_gap,tracker_gap,ne_residual
  // and 17 significant digits.
  void write_csv(std::ostream& out) const;
  void save_csv(const std::string& path) const;

  // Geometric mean of successive NE-residual ratios over the final third of
  // the iterations. Empty when no iteration was run.
  std::optional<double> empirical_rate() const;

  // Least-squares fit of log(ne_residual) against the iteration index over the
  // final two-thirds of the records.
  struct LogLinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
  };
  LogLinearFit log_residual_fit() const;

 private:
  std::vector<TraceRecord> records_;
};

struct XiMetrics {
  double consensus = 0.0;
  double optimality = 0.0;
  double tracker = 0.0;

  Eigen::Vector3d vector() const { return {consensus, optimality, tracker}; }
};

struct StopCriteria {
  std::size_t max_iters = 10000;
  double residual_tol = 1e-6;
};

enum class StepMode { kCompact, kAgentwise };

struct RunSummary {
  std::size_t iterations = 0;
  bool converged = false;
  double final_residual = 0.0;
  std::optional<double> empirical_rate;
};

// Uniform draws in [low, high) for every entry of an n x q estimate matrix.
Eigen::MatrixXd random_estimates(const ClusterGameSpec& spec,
                                 std::uint64_t seed, double low = 0.0,
                                 double high = 1.0);

// State of the distributed gradient-tracking iteration. Row r of the estimate
// matrix is agent r's view of every cluster's strategy; its own-cluster block
// is the agent's strategy. Trackers are initialised to the local gradients.
class DgtEngine {
 public:
  DgtEngine(std::shared_ptr<const ClusterGameSpec> spec,
            std::shared_ptr<const CompositeMixing> mixing, Eigen::MatrixXd x0);

  // Enables the optimality gap in subsequent trace records (and rewrites the
  // current record).
  void set_reference(const ConsensualPoint& x_star);

  // x <- A x - alpha V, then v_i <- A_i v_i + G_i(x_new) - G_i(x_old).
  void step_compact(double alpha);
  // Same update written per agent, reading only neighbor rows.
  void step_agentwise(double alpha);
  void step(double alpha, StepMode mode);

  RunSummary run(double alpha, const StopCriteria& stop,
                 StepMode mode = StepMode::kCompact);

  const ClusterGameSpec& spec() const { return *spec_; }
  const CompositeMixing& mixing() const { return *mixing_; }
  const Eigen::MatrixXd& estimates() const { return x_; }
  const std::vector<Eigen::MatrixXd>& trackers() const { return trackers_; }
  const ConvergenceTrace& trace() const { return trace_; }
  std::size_t iteration() const { return iteration_; }

  // (pi^T x)^T
  Eigen::VectorXd pi_average() const;
  // Own strategy of every agent, stacked in global order (length N).
  Eigen::VectorXd own_strategies() const;

  XiMetrics xi_metrics(const ConsensualPoint& x_star) const;

  // max_i ||1^T v_i - sum_j grad f_ij(row)|| / (1 + ||v_i||_F), with the
  // gradients re-evaluated from the game.
  double conservation_residual() const;

  // Largest distance between two estimate rows of the same cluster.
  double max_intra_cluster_spread() const;

 private:
  void check_alpha(double alpha) const;
  std::vector<Eigen::MatrixXd> gradients_at(const Eigen::MatrixXd& x) const;
  void commit(Eigen::MatrixXd x_next, std::vector<Eigen::MatrixXd> v_next,
              std::vector<Eigen::MatrixXd> g_next);
  TraceRecord record() const;

  std::shared_ptr<const ClusterGameSpec> spec_;
  std::shared_ptr<const CompositeMixing> mixing_;
  Eigen::MatrixXd x_;
  std::vector<Eigen::MatrixXd> trackers_;
  std::vector<Eigen::MatrixXd> gradients_;
  std::optional<Eigen::VectorXd> reference_;
  ConvergenceTrace trace_;
  std::size_t iteration_ = 0;
};

// Trace record of an arbitrary (estimates, trackers) state. Shared by the
// engine and the message-passing simulator so both emit the same schema.
TraceRecord measure_state(const ClusterGameSpec& spec,
                          const CompositeMixing& mixing,
                          const Eigen::MatrixXd& x,
                          const std::vector<Eigen::MatrixXd>& trackers,
                          const std::optional<Eigen::VectorXd>& reference,
                          std::size_t iter);

// The block-diagonal embedding V of the per-cluster trackers (n x q).
Eigen::MatrixXd embed_trackers(const ClusterGameSpec& spec,
                               const std::vector<Eigen::MatrixXd>& trackers);

}  // namespace dgt

#endif  // DGT_ENGINE_HPP_
