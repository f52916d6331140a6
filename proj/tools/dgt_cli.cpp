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

// Command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 success, 2 configuration or I/O error, 3 divergence,
// 4 precondition failure (bad topology, non-monotone game, ...).

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "dgt/dgt.h"

namespace {

int exit_code(dgt_status status) {
  switch (status) {
    case DGT_OK:
      return 0;
    case DGT_ERR_CONFIG:
    case DGT_ERR_IO:
    case DGT_ERR_INVALID_ARGUMENT:
      return 2;
    case DGT_ERR_DIVERGENCE:
      return 3;
    case DGT_ERR_INTERNAL:
      return 1;
    default:
      return 4;
  }
}

int report_failure(dgt_status status) {
  std::fprintf(stderr, "dgt: %s: %s\n", dgt_status_name(status),
               dgt_last_error());
  return exit_code(status);
}

// Loads the config, runs `body` on it, prints any JSON it produced.
template <typename F>
int with_config(const std::string& path, F&& body) {
  dgt_config* cfg = nullptr;
  dgt_status status = dgt_config_load(path.c_str(), &cfg);
  if (status != DGT_OK) return report_failure(status);
  char* json = nullptr;
  status = body(cfg, &json);
  if (json != nullptr) {
    std::printf("%s\n", json);
    dgt_string_free(json);
  }
  dgt_config_free(cfg);
  return status == DGT_OK ? 0 : report_failure(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed gradient-tracking Nash equilibrium seeking"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = ".";
  std::string mode = "simnet";

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Experiment configuration file")
        ->required();
  };

  CLI::App* run = app.add_subcommand("run", "Run the iteration, write trace and report");
  add_config(run);
  run->add_option("--out-dir", out_dir, "Directory for relative output paths");

  CLI::App* simulate =
      app.add_subcommand("simulate", "Like run, on the message-passing network");
  add_config(simulate);
  simulate->add_option("--out-dir", out_dir, "Directory for relative output paths");
  simulate->add_option("--mode", mode, "simnet or engine")
      ->check(CLI::IsMember({"simnet", "engine"}));

  CLI::App* solve = app.add_subcommand("solve-ne", "Centralised NE oracle");
  add_config(solve);
  CLI::App* bound = app.add_subcommand("compute-bound", "Step-size bound");
  add_config(bound);
  CLI::App* validate =
      app.add_subcommand("validate-topology", "Check graphs and mixing matrix");
  add_config(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (run->parsed() || simulate->parsed()) {
    const std::string run_mode = run->parsed() ? "engine" : mode;
    return with_config(config, [&](dgt_config* cfg, char** json) {
      return dgt_run_experiment(cfg, run_mode.c_str(), out_dir.c_str(), json);
    });
  }
  if (solve->parsed()) {
    return with_config(config, [](dgt_config* cfg, char** json) {
      return dgt_solve_ne_json(cfg, json);
    });
  }
  if (bound->parsed()) {
    return with_config(config, [](dgt_config* cfg, char** json) {
      return dgt_compute_bound_json(cfg, json);
    });
  }
  return with_config(config, [](dgt_config* cfg, char** json) {
    return dgt_validate_topology_json(cfg, json);
  });
}
