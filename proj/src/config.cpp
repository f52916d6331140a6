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

#include "dgt/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "dgt/error.hpp"

namespace dgt {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& v, int line) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError(line, "expected a number, got '" + v + "'");
  }
  return out;
}

long long to_integer(const std::string& v, int line) {
  long long out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(line, "expected an integer, got '" + v + "'");
  }
  return out;
}

int to_positive_int(const std::string& v, int line) {
  const long long out = to_integer(v, line);
  if (out <= 0 || out > 1000000) {
    throw ConfigError(line, "expected a positive integer, got '" + v + "'");
  }
  return static_cast<int>(out);
}

std::vector<int> to_int_list(const std::string& v, int line) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_positive_int(trim(item), line));
  if (out.empty()) throw ConfigError(line, "empty list");
  return out;
}

// Where each key came from, for diagnostics raised after parsing.
using LineMap = std::map<std::string, int>;

int line_of(const LineMap& lines, const std::string& key) {
  const auto it = lines.find(key);
  return it == lines.end() ? 0 : it->second;
}

void resolve(RunConfig& cfg, const LineMap& lines,
             const std::optional<std::vector<int>>& sizes,
             std::optional<int> agents_per_cluster,
             const std::optional<std::vector<int>>& dims) {
  if (cfg.game_kind != "cournot" && cfg.game_kind != "quadratic-random") {
    throw ConfigError(line_of(lines, "game.kind"),
                      "game kind must be cournot or quadratic-random");
  }
  if (sizes && agents_per_cluster) {
    throw ConfigError(line_of(lines, "game.sizes"),
                      "give either sizes or agents_per_cluster, not both");
  }
  if (sizes) {
    if (lines.count("game.clusters") &&
        static_cast<int>(sizes->size()) != cfg.clusters) {
      throw ConfigError(line_of(lines, "game.sizes"),
                        "sizes has " + std::to_string(sizes->size()) +
                            " entries but clusters = " +
                            std::to_string(cfg.clusters));
    }
    cfg.sizes = *sizes;
    cfg.clusters = static_cast<int>(sizes->size());
  } else {
    cfg.sizes.assign(cfg.clusters, agents_per_cluster.value_or(20));
  }

  if (cfg.game_kind == "cournot") {
    if (dims) {
      throw ConfigError(line_of(lines, "game.dims"),
                        "cournot clusters have scalar strategies");
    }
    for (int s : cfg.sizes) {
      if (s != cfg.sizes.front()) {
        throw ConfigError(line_of(lines, "game.sizes"),
                          "cournot needs equal cluster sizes");
      }
    }
    cfg.cournot.clusters = cfg.clusters;
    cfg.cournot.agents_per_cluster = cfg.sizes.front();
    cfg.dims.assign(cfg.clusters, 1);
  } else {
    if (!dims) {
      cfg.dims.assign(cfg.clusters, 1);
    } else if (dims->size() == 1) {
      cfg.dims.assign(cfg.clusters, dims->front());
    } else if (static_cast<int>(dims->size()) == cfg.clusters) {
      cfg.dims = *dims;
    } else {
      throw ConfigError(line_of(lines, "game.dims"),
                        "dims needs one entry or one per cluster");
    }
  }

  for (const auto& [k, spec] : cfg.intra_override) {
    if (k >= cfg.clusters) {
      throw ConfigError(line_of(lines, "topology.intra." + std::to_string(k + 1)),
                        "cluster index out of range");
    }
  }
  if (!(cfg.init_high > cfg.init_low)) {
    throw ConfigError(line_of(lines, "algorithm.init_high"),
                      "init_high must exceed init_low");
  }
}

}  // namespace

const std::string& RunConfig::intra_for(int cluster) const {
  const auto it = intra_override.find(cluster);
  return it == intra_override.end() ? intra : it->second;
}

bool is_generator_name(const std::string& name) {
  static const std::set<std::string> kNames = {"ring", "path", "star",
                                               "complete"};
  return kNames.count(name) > 0;
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  LineMap lines;
  std::optional<std::vector<int>> sizes;
  std::optional<int> agents_per_cluster;
  std::optional<std::vector<int>> dims;

  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "game" && section != "topology" && section != "algorithm" &&
          section != "output") {
        throw ConfigError(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line_no, "expected 'key = value'");
    }
    if (section.empty()) throw ConfigError(line_no, "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "missing key");
    if (value.empty()) throw ConfigError(line_no, "missing value for '" + key + "'");
    const std::string full = section + "." + key;
    if (!lines.emplace(full, line_no).second) {
      throw ConfigError(line_no, "duplicate key '" + key + "'");
    }

    if (section == "game") {
      if (key == "kind") {
        cfg.game_kind = value;
      } else if (key == "clusters") {
        cfg.clusters = to_positive_int(value, line_no);
      } else if (key == "agents_per_cluster") {
        agents_per_cluster = to_positive_int(value, line_no);
      } else if (key == "sizes") {
        sizes = to_int_list(value, line_no);
      } else if (key == "dims") {
        dims = to_int_list(value, line_no);
      } else if (key == "seed") {
        cfg.game_seed = static_cast<std::uint64_t>(to_integer(value, line_no));
      } else if (key == "quad_cost") {
        cfg.cournot.quad_cost = to_double(value, line_no);
      } else if (key == "lin_cost") {
        cfg.cournot.lin_cost = to_double(value, line_no);
      } else if (key == "price_intercept") {
        cfg.cournot.price_intercept = to_double(value, line_no);
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [game]");
      }
    } else if (section == "topology") {
      if (key == "inter") {
        cfg.inter = value;
      } else if (key == "intra") {
        cfg.intra = value;
      } else if (key.rfind("intra.", 0) == 0) {
        const int k = to_positive_int(key.substr(6), line_no);
        cfg.intra_override[k - 1] = value;
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [topology]");
      }
    } else if (section == "algorithm") {
      if (key == "alpha") {
        if (value == "auto") {
          cfg.alpha.reset();
        } else {
          const double a = to_double(value, line_no);
          if (!(a > 0.0)) throw ConfigError(line_no, "alpha must be positive");
          cfg.alpha = a;
        }
      } else if (key == "max_iters") {
        const long long it = to_integer(value, line_no);
        if (it < 0) throw ConfigError(line_no, "max_iters must be nonnegative");
        cfg.max_iters = static_cast<std::size_t>(it);
      } else if (key == "residual_tol") {
        cfg.residual_tol = to_double(value, line_no);
        if (cfg.residual_tol < 0.0) {
          throw ConfigError(line_no, "residual_tol must be nonnegative");
        }
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(to_integer(value, line_no));
      } else if (key == "init_low") {
        cfg.init_low = to_double(value, line_no);
      } else if (key == "init_high") {
        cfg.init_high = to_double(value, line_no);
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [algorithm]");
      }
    } else {
      if (key == "trace") {
        cfg.trace_path = value;
      } else if (key == "report") {
        cfg.report_path = value;
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [output]");
      }
    }
  }
  resolve(cfg, lines, sizes, agents_per_cluster, dims);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  const std::filesystem::path dir = path.has_parent_path() ? path.parent_path()
                                                          : std::filesystem::path(".");
  return parse_config(in, dir);
}

}  // namespace dgt
