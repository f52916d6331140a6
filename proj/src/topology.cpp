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

#include "dgt/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <utility>

#include "dgt/error.hpp"
#include "dgt/linalg.hpp"

namespace dgt {
namespace {

bool is_connected(const std::vector<std::vector<int>>& nbrs) {
  if (nbrs.empty()) return true;
  std::vector<bool> seen(nbrs.size(), false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t visited = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : nbrs[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++visited;
        frontier.push(w);
      }
    }
  }
  return visited == nbrs.size();
}

std::string describe(int i, int j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

GraphTopology GraphTopology::from_weights(Eigen::MatrixXd weights) {
  const Eigen::Index n = weights.rows();
  if (n == 0) throw DomainError("graph has no vertices");
  if (weights.cols() != n) throw DomainError("weight matrix is not square");
  if (!weights.allFinite()) throw DomainError("weight matrix is not finite");

  std::vector<std::vector<int>> nbrs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(weights(i, i) > 0.0)) {
      throw TopologyError("diagonal weight " + describe(i, i) +
                          " is not positive");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = weights(i, j);
      if (w < 0.0) {
        throw TopologyError("negative weight at " + describe(i, j));
      }
      if (i == j) continue;
      if ((w > 0.0) != (weights(j, i) > 0.0)) {
        throw TopologyError("sparsity pattern is not symmetric at " +
                            describe(i, j));
      }
      if (w > 0.0) nbrs[i].push_back(static_cast<int>(j));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double row = weights.row(i).sum();
    const double col = weights.col(i).sum();
    if (std::abs(row - 1.0) > kStochasticTol) {
      throw TopologyError("row " + std::to_string(i) + " sums to " +
                          std::to_string(row));
    }
    if (std::abs(col - 1.0) > kStochasticTol) {
      throw TopologyError("column " + std::to_string(i) + " sums to " +
                          std::to_string(col));
    }
  }
  if (!is_connected(nbrs)) throw TopologyError("graph is not connected");
  return GraphTopology(std::move(weights), std::move(nbrs));
}

std::vector<Edge> GraphTopology::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < vertex_count(); ++i) {
    for (int j : neighbors_[i]) {
      if (i < j) out.push_back({i, j});
    }
  }
  return out;
}

GraphTopology metropolis_weights(int vertex_count,
                                 std::span<const Edge> edges) {
  if (vertex_count <= 0) throw DomainError("graph has no vertices");
  std::set<std::pair<int, int>> unique;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= vertex_count || e.v >= vertex_count) {
      throw DomainError("edge " + describe(e.u, e.v) + " out of range for " +
                        std::to_string(vertex_count) + " vertices");
    }
    if (e.u == e.v) {
      throw DomainError("self loop at vertex " + std::to_string(e.u));
    }
    unique.emplace(std::min(e.u, e.v), std::max(e.u, e.v));
  }

  std::vector<int> degree(vertex_count, 0);
  for (const auto& [u, v] : unique) {
    ++degree[u];
    ++degree[v];
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(vertex_count, vertex_count);
  for (const auto& [u, v] : unique) {
    const double weight = 1.0 / (1.0 + std::max(degree[u], degree[v]));
    w(u, v) = weight;
    w(v, u) = weight;
  }
  for (int i = 0; i < vertex_count; ++i) {
    double off = 0.0;
    for (int j = 0; j < vertex_count; ++j) {
      if (j != i) off += w(i, j);
    }
    w(i, i) = 1.0 - off;
  }

  // Connectivity is checked here so that the error says topology, not weights.
  std::vector<std::vector<int>> nbrs(vertex_count);
  for (const auto& [u, v] : unique) {
    nbrs[u].push_back(v);
    nbrs[v].push_back(u);
  }
  if (!is_connected(nbrs)) throw TopologyError("graph is not connected");
  return GraphTopology::from_weights(std::move(w));
}

GraphTopology uniform_complete(int vertex_count) {
  if (vertex_count <= 0) throw DomainError("graph has no vertices");
  return GraphTopology::from_weights(
      Eigen::MatrixXd::Constant(vertex_count, vertex_count,
                                1.0 / vertex_count));
}

std::vector<Edge> path_edges(int vertex_count) {
  std::vector<Edge> out;
  for (int i = 0; i + 1 < vertex_count; ++i) out.push_back({i, i + 1});
  return out;
}

std::vector<Edge> ring_edges(int vertex_count) {
  // Rings on fewer than three vertices collapse to paths.
  std::vector<Edge> out = path_edges(vertex_count);
  if (vertex_count >= 3) out.push_back({vertex_count - 1, 0});
  return out;
}

std::vector<Edge> star_edges(int vertex_count) {
  std::vector<Edge> out;
  for (int i = 1; i < vertex_count; ++i) out.push_back({0, i});
  return out;
}

std::vector<Edge> complete_edges(int vertex_count) {
  std::vector<Edge> out;
  for (int i = 0; i < vertex_count; ++i) {
    for (int j = i + 1; j < vertex_count; ++j) out.push_back({i, j});
  }
  return out;
}

std::vector<Edge> generated_edges(const std::string& name, int vertex_count) {
  if (name == "ring") return ring_edges(vertex_count);
  if (name == "path") return path_edges(vertex_count);
  if (name == "star") return star_edges(vertex_count);
  if (name == "complete") return complete_edges(vertex_count);
  throw DomainError("unknown graph generator '" + name + "'");
}

EdgeList parse_edge_list(std::istream& in, int min_vertices) {
  EdgeList out;
  int max_index = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    long long u = 0;
    long long v = 0;
    if (!(fields >> u)) {
      std::string rest;
      fields.clear();
      if (fields >> rest) {
        throw ConfigError(line_no, "expected 'u v' vertex pair");
      }
      continue;  // blank or comment-only line
    }
    if (!(fields >> v)) {
      throw ConfigError(line_no, "expected 'u v' vertex pair");
    }
    std::string extra;
    if (fields >> extra) {
      throw ConfigError(line_no, "unexpected token '" + extra + "'");
    }
    if (u < 0 || v < 0 || u > 1'000'000 || v > 1'000'000) {
      throw ConfigError(line_no, "vertex index out of range");
    }
    out.edges.push_back({static_cast<int>(u), static_cast<int>(v)});
    max_index = std::max({max_index, static_cast<int>(u), static_cast<int>(v)});
  }
  out.vertex_count = std::max(max_index + 1, min_vertices);
  return out;
}

EdgeList load_edge_list(const std::string& path, int min_vertices) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list '" + path + "'");
  return parse_edge_list(in, min_vertices);
}

ClusterLayout::ClusterLayout(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw DomainError("at least one cluster is required");
  offsets_.reserve(sizes_.size());
  for (int s : sizes_) {
    if (s <= 0) throw DomainError("cluster sizes must be positive");
    offsets_.push_back(total_);
    total_ += s;
  }
}

AgentId ClusterLayout::agent(int global_row) const {
  if (global_row < 0 || global_row >= total_) {
    throw DomainError("agent row " + std::to_string(global_row) +
                      " out of range");
  }
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global_row);
  const int cluster = static_cast<int>(it - offsets_.begin()) - 1;
  return {cluster, global_row - offsets_[cluster]};
}

double CompositeMixing::sigma_max() const {
  double out = 0.0;
  for (double s : cluster_sigmas_) out = std::max(out, s);
  return out;
}

Eigen::MatrixXd CompositeMixing::limit_matrix() const {
  return Eigen::VectorXd::Ones(agent_count()) * pi_.transpose();
}

CompositeMixing compose_adjacency(const GraphTopology& inter,
                                  std::vector<GraphTopology> intra) {
  const int m = inter.vertex_count();
  if (static_cast<int>(intra.size()) != m) {
    throw DomainError("inter-cluster graph has " + std::to_string(m) +
                      " vertices but " + std::to_string(intra.size()) +
                      " intra-cluster graphs were given");
  }
  std::vector<int> sizes;
  sizes.reserve(m);
  for (const auto& g : intra) sizes.push_back(g.vertex_count());

  CompositeMixing out(inter, std::move(intra));
  out.layout_ = ClusterLayout(sizes);
  const ClusterLayout& layout = out.layout_;
  const int n = layout.agent_count();

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < m; ++i) {
    const Eigen::MatrixXd& ai = out.intra_[i].weights();
    const int off = layout.offset(i);
    a.block(off, off, sizes[i], sizes[i]) = ai;
    // Representative row: half intra-cluster, half inter-cluster.
    a.block(off, off, 1, sizes[i]) *= 0.5;
    for (int h = 0; h < m; ++h) {
      a(off, layout.offset(h)) += 0.5 * inter.weight(i, h);
    }
  }
  for (int r = 0; r < n; ++r) {
    if (std::abs(a.row(r).sum() - 1.0) > kStochasticTol) {
      throw TopologyError("composite row " + std::to_string(r) +
                          " is not stochastic");
    }
  }
  out.matrix_ = std::move(a);
  out.pi_ = stationary_weights(sizes);
  out.sigma_ = contraction_factor(out.matrix_, out.pi_);
  out.cluster_sigmas_.reserve(m);
  for (const auto& g : out.intra_) {
    out.cluster_sigmas_.push_back(cluster_contraction(g));
  }
  return out;
}

Eigen::VectorXd stationary_weights(std::span<const int> cluster_sizes) {
  if (cluster_sizes.empty()) {
    throw DomainError("at least one cluster is required");
  }
  long long n = 0;
  for (int s : cluster_sizes) {
    if (s <= 0) throw DomainError("cluster sizes must be positive");
    n += s;
  }
  const double denom = static_cast<double>(n + cluster_sizes.size());
  Eigen::VectorXd pi(n);
  Eigen::Index row = 0;
  for (int s : cluster_sizes) {
    pi(row++) = 2.0 / denom;
    for (int j = 1; j < s; ++j) pi(row++) = 1.0 / denom;
  }
  return pi;
}

double contraction_factor(const Eigen::MatrixXd& matrix,
                          const Eigen::VectorXd& pi) {
  const Eigen::Index n = matrix.rows();
  if (matrix.cols() != n || pi.size() != n) {
    throw DomainError("contraction_factor: dimension mismatch");
  }
  const Eigen::VectorXd root = pi.array().sqrt();
  const Eigen::MatrixXd diff =
      matrix - Eigen::VectorXd::Ones(n) * pi.transpose();
  const Eigen::MatrixXd scaled =
      root.asDiagonal() * diff * root.cwiseInverse().asDiagonal();
  return spectral_norm(scaled);
}

double cluster_contraction(const GraphTopology& intra) {
  const int n = intra.vertex_count();
  const Eigen::MatrixXd diff =
      intra.weights() - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  return spectral_norm(diff);
}

double weighted_fro_norm(const Eigen::MatrixXd& x, const Eigen::VectorXd& pi) {
  if (x.rows() != pi.size()) {
    throw DomainError("weighted_fro_norm: " + std::to_string(x.rows()) +
                      " rows but " + std::to_string(pi.size()) + " weights");
  }
  return (pi.array().sqrt().matrix().asDiagonal() * x).norm();
}

double weighted_euc_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& pi) {
  if (x.size() != pi.size()) {
    throw DomainError("weighted_euc_norm: dimension mismatch");
  }
  return (pi.array().sqrt() * x.array()).matrix().norm();
}

}  // namespace dgt
