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

#ifndef DGT_CONFIG_HPP_
#define DGT_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dgt/game.hpp"

namespace dgt {

// Experiment configuration. The file format is line oriented:
//
//   # comment (also allowed after a value)
//   [section]
//   key = value
//
// Sections and keys:
//
//   [game]       kind = cournot | quadratic-random
//                clusters = M
//                agents_per_cluster = N     (same size everywhere), or
//                sizes = n1, n2, ...        (one per cluster)
//                dims = d or d1, d2, ...    (quadratic-random only)
//                seed = S                   (quadratic-random only)
//                quad_cost, lin_cost, price_intercept   (cournot only)
//   [topology]   inter = complete-uniform | ring | path | star | complete | FILE
//                intra = ring | path | star | complete | FILE
//                intra.K = ...              (override for cluster K, 1-based)
//   [algorithm]  alpha = X | auto           (auto is half the step bound)
//                max_iters, residual_tol, seed, init_low, init_high
//   [output]     trace = PATH, report = PATH
//
// Generator names build Metropolis weights on that graph; anything else is
// an edge-list file resolved against the directory of the config file.
struct RunConfig {
  std::string game_kind = "cournot";
  int clusters = 5;
  std::vector<int> sizes;  // resolved, one per cluster
  std::vector<int> dims;   // resolved, one per cluster
  CournotParams cournot;
  std::uint64_t game_seed = 1;

  std::string inter = "complete-uniform";
  std::string intra = "ring";
  std::map<int, std::string> intra_override;  // 0-based cluster index

  std::optional<double> alpha;  // empty means auto
  std::size_t max_iters = 20000;
  double residual_tol = 1e-6;
  std::uint64_t seed = 1;
  double init_low = 0.0;
  double init_high = 1.0;

  std::string trace_path = "trace.csv";
  std::string report_path = "report.json";

  std::filesystem::path base_dir = ".";

  // Topology spec for cluster i (override or the shared default).
  const std::string& intra_for(int cluster) const;
};

// Throws ConfigError (carrying the offending line) on malformed input.
RunConfig parse_config(std::istream& in,
                       const std::filesystem::path& base_dir = ".");
// IoError if the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

bool is_generator_name(const std::string& name);

}  // namespace dgt

#endif  // DGT_CONFIG_HPP_
