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

#ifndef DGT_TOPOLOGY_HPP_
#define DGT_TOPOLOGY_HPP_

#include <Eigen/Dense>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace dgt {

// Row/column sum tolerance for doubly stochastic weights.
inline constexpr double kStochasticTol = 1e-12;

struct Edge {
  int u = 0;
  int v = 0;
};

struct EdgeList {
  int vertex_count = 0;
  std::vector<Edge> edges;
};

// Position of an agent inside the multi-cluster game. Both indices are
// 0-based; agent 0 of every cluster is its representative.
struct AgentId {
  int cluster = 0;
  int agent = 0;

  bool is_representative() const { return agent == 0; }
  friend bool operator==(const AgentId&, const AgentId&) = default;
};

// Undirected connected graph together with a doubly stochastic weight matrix
// whose sparsity pattern is the edge set plus the diagonal. Instances are
// always valid; the only way to build one is through a validating factory.
class GraphTopology {
 public:
  // Validates every invariant and throws DomainError/TopologyError.
  static GraphTopology from_weights(Eigen::MatrixXd weights);

  int vertex_count() const { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  double weight(int i, int j) const { return weights_(i, j); }

  // Off-diagonal neighbors of v, ascending.
  const std::vector<int>& neighbors(int v) const { return neighbors_[v]; }
  std::vector<Edge> edges() const;

 private:
  GraphTopology(Eigen::MatrixXd weights, std::vector<std::vector<int>> nbrs)
      : weights_(std::move(weights)), neighbors_(std::move(nbrs)) {}

  Eigen::MatrixXd weights_;
  std::vector<std::vector<int>> neighbors_;
};

// w_ij = 1/(1 + max(d_i, d_j)) on edges, diagonal fills the row to one.
GraphTopology metropolis_weights(int vertex_count, std::span<const Edge> edges);
inline GraphTopology metropolis_weights(const EdgeList& list) {
  return metropolis_weights(list.vertex_count, list.edges);
}

// Complete graph with every weight equal to 1/n.
GraphTopology uniform_complete(int vertex_count);

std::vector<Edge> ring_edges(int vertex_count);
std::vector<Edge> path_edges(int vertex_count);
std::vector<Edge> star_edges(int vertex_count);
std::vector<Edge> complete_edges(int vertex_count);

// Builds an edge set from a generator name: ring, path, star or complete.
std::vector<Edge> generated_edges(const std::string& name, int vertex_count);

// Edge-list text format: one "u v" pair per line, 0-indexed, '#' starts a
// comment. The vertex count is one past the largest index seen unless
// `min_vertices` is larger.
EdgeList parse_edge_list(std::istream& in, int min_vertices = 0);
EdgeList load_edge_list(const std::string& path, int min_vertices = 0);

// Global row layout of the n agents: cluster blocks stacked in order.
class ClusterLayout {
 public:
  ClusterLayout() = default;
  explicit ClusterLayout(std::vector<int> sizes);

  int cluster_count() const { return static_cast<int>(sizes_.size()); }
  int agent_count() const { return total_; }
  int size(int cluster) const { return sizes_[cluster]; }
  int offset(int cluster) const { return offsets_[cluster]; }
  int global(AgentId id) const { return offsets_[id.cluster] + id.agent; }
  AgentId agent(int global_row) const;
  const std::vector<int>& sizes() const { return sizes_; }

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int total_ = 0;
};

// The composite n x n mixing matrix over all agents, built from the
// inter-cluster graph among representatives and the intra-cluster graphs.
class CompositeMixing {
 public:
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::VectorXd& pi() const { return pi_; }
  double sigma() const { return sigma_; }
  const std::vector<double>& cluster_sigmas() const { return cluster_sigmas_; }
  double sigma_max() const;
  const ClusterLayout& layout() const { return layout_; }
  const GraphTopology& inter() const { return inter_; }
  const GraphTopology& intra(int cluster) const { return intra_[cluster]; }

  int cluster_count() const { return layout_.cluster_count(); }
  int agent_count() const { return layout_.agent_count(); }

  // 1_n pi^T, derived on demand.
  Eigen::MatrixXd limit_matrix() const;

 private:
  friend CompositeMixing compose_adjacency(const GraphTopology&,
                                           std::vector<GraphTopology>);
  CompositeMixing(GraphTopology inter, std::vector<GraphTopology> intra)
      : inter_(std::move(inter)), intra_(std::move(intra)) {}

  GraphTopology inter_;
  std::vector<GraphTopology> intra_;
  ClusterLayout layout_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd pi_;
  double sigma_ = 0.0;
  std::vector<double> cluster_sigmas_;
};

CompositeMixing compose_adjacency(const GraphTopology& inter,
                                  std::vector<GraphTopology> intra);

// Closed form: 2/(n+m) for each representative, 1/(n+m) for everyone else.
Eigen::VectorXd stationary_weights(std::span<const int> cluster_sizes);

// ||diag(sqrt(pi)) (A - 1 pi^T) diag(sqrt(pi))^{-1}||_2
double contraction_factor(const Eigen::MatrixXd& matrix,
                          const Eigen::VectorXd& pi);
inline double contraction_factor(const CompositeMixing& c) {
  return contraction_factor(c.matrix(), c.pi());
}

// ||A_i - 1 1^T / n_i||_2
double cluster_contraction(const GraphTopology& intra);

double weighted_fro_norm(const Eigen::MatrixXd& x, const Eigen::VectorXd& pi);
double weighted_euc_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& pi);

}  // namespace dgt

#endif  // DGT_TOPOLOGY_HPP_
