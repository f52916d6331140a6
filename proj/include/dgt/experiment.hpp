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

#ifndef DGT_EXPERIMENT_HPP_
#define DGT_EXPERIMENT_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "dgt/config.hpp"
#include "dgt/game.hpp"
#include "dgt/oracle.hpp"
#include "dgt/stepsize.hpp"
#include "dgt/topology.hpp"

namespace dgt {

enum class RunMode { kEngine, kSimnet };

std::string to_string(RunMode mode);

struct ExperimentSetup {
  std::shared_ptr<const ClusterGameSpec> spec;
  std::shared_ptr<const CompositeMixing> mixing;
};

// Graphs only; used by the topology validator as well.
CompositeMixing build_mixing(const RunConfig& cfg);
ExperimentSetup build_experiment(const RunConfig& cfg);

struct BoundReport {
  GainConstants constants;
  StepBound bound;
  double rho_at_half_step = 0.0;  // rho(Phi(max_step / 2))
};
BoundReport compute_bound(const ExperimentSetup& setup);

struct ExperimentReport {
  Eigen::VectorXd ne;         // oracle solution, stacked over clusters
  Eigen::VectorXd dgt_final;  // pi-weighted average of the final estimates
  double max_abs_error = 0.0;  // worst own strategy vs the oracle
  std::optional<double> empirical_rate;
  double alpha_used = 0.0;
  bool alpha_auto = false;
  std::optional<double> alpha_star;  // empty when the bound is undefined
  std::optional<double> max_step;
  std::size_t iterations = 0;
  double final_residual = 0.0;
  std::string status;  // converged | max_iters | diverged
  std::string divergence_message;
  RunMode mode = RunMode::kEngine;
  OracleMethod oracle_method = OracleMethod::kLinearSolve;
  double oracle_residual = 0.0;
  std::filesystem::path trace_path;
  std::filesystem::path report_path;

  bool diverged() const { return status == "diverged"; }
};

// Builds everything, solves the oracle NE, runs the iteration and writes the
// trace CSV and JSON report under `out_dir` (relative output paths only).
// Divergence is reported through the status field, not an exception.
ExperimentReport run_experiment(const RunConfig& cfg, RunMode mode,
                                const std::filesystem::path& out_dir);

std::string report_json(const ExperimentReport& report);
// {"clusters": [[...], ...], "residual": r, "method": "..."}
std::string solve_ne_json(const RunConfig& cfg);
std::string compute_bound_json(const RunConfig& cfg);
std::string validate_topology_json(const RunConfig& cfg);

}  // namespace dgt

#endif  // DGT_EXPERIMENT_HPP_
