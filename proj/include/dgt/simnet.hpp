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

#ifndef DGT_SIMNET_HPP_
#define DGT_SIMNET_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "dgt/engine.hpp"
#include "dgt/game.hpp"
#include "dgt/topology.hpp"

namespace dgt {

// Round-synchronised message passing: each agent owns its state and sees
// the rest of the network only through the messages its neighbors publish.

struct RoundMessage {
  AgentId sender;
  Eigen::VectorXd estimate;  // full q-vector
  Eigen::VectorXd tracker;   // own-cluster block; read intra-cluster only
};

struct ReadEvent {
  std::size_t round = 0;
  AgentId reader;
  AgentId sender;
  bool tracker = false;
};

// Messages of one round, indexed by global agent row. Reads go through
// estimate()/tracker(), which fail loudly on a missing message and can log.
class Mailbox {
 public:
  explicit Mailbox(ClusterLayout layout);

  void post(RoundMessage msg);
  void clear();
  bool has(AgentId sender) const;

  // ProtocolError if nothing was posted by `sender` this round, or (tracker
  // only) when reader and sender are in different clusters.
  const Eigen::VectorXd& estimate(AgentId reader, AgentId sender,
                                  std::vector<ReadEvent>* log = nullptr) const;
  const Eigen::VectorXd& tracker(AgentId reader, AgentId sender,
                                 std::vector<ReadEvent>* log = nullptr) const;

  std::size_t round() const { return round_; }
  void set_round(std::size_t r) { round_ = r; }

 private:
  const RoundMessage& lookup(AgentId sender) const;

  ClusterLayout layout_;
  std::vector<std::optional<RoundMessage>> slots_;
  std::size_t round_ = 0;
};

class AgentProcess {
 public:
  struct Link {
    int peer;  // agent index inside the cluster, or cluster index for inter
    double weight;
  };

  AgentProcess(AgentId id, std::shared_ptr<const ClusterGameSpec> spec,
               double self_weight, std::vector<Link> intra,
               double inter_self_weight, std::vector<Link> inter,
               Eigen::VectorXd estimate);

  AgentId id() const { return id_; }
  bool is_representative() const { return id_.is_representative(); }
  const std::vector<Link>& intra_links() const { return intra_; }
  const std::vector<Link>& inter_links() const { return inter_; }
  const Eigen::VectorXd& estimate() const { return estimate_; }
  const Eigen::VectorXd& tracker() const { return tracker_; }

  RoundMessage publish() const;

  // Phase 2: new estimate from the mailbox, then the tracker update with a
  // fresh local gradient. Reads nothing but the mailbox and own fields.
  void update(const Mailbox& inbox, double alpha,
              std::vector<ReadEvent>* log = nullptr);

 private:
  AgentId id_;
  std::shared_ptr<const ClusterGameSpec> spec_;
  double self_weight_;
  std::vector<Link> intra_;
  double inter_self_weight_;
  std::vector<Link> inter_;
  Eigen::VectorXd estimate_;
  Eigen::VectorXd tracker_;
  Eigen::VectorXd gradient_;  // gradient at the current estimate
};

struct NetworkOptions {
  int threads = 1;         // phase-2 workers
  bool log_reads = false;  // record every mailbox read
};

class Network {
 public:
  Network(std::shared_ptr<const ClusterGameSpec> spec,
          std::shared_ptr<const CompositeMixing> mixing, Eigen::MatrixXd x0,
          NetworkOptions options = {});

  // One synchronous round: publish everything, barrier, update everyone.
  // alpha = 0 is plain consensus mixing of the estimates.
  void round(double alpha);
  RunSummary run(double alpha, const StopCriteria& stop);

  void set_reference(const ConsensualPoint& x_star);

  std::size_t rounds() const { return rounds_; }
  const std::vector<AgentProcess>& agents() const { return agents_; }
  const std::vector<ReadEvent>& read_log() const { return log_; }
  const ConvergenceTrace& trace() const { return trace_; }

  // Assembled views of the distributed state, in global agent order.
  Eigen::MatrixXd estimates() const;
  std::vector<Eigen::MatrixXd> trackers() const;

 private:
  TraceRecord record() const;

  std::shared_ptr<const ClusterGameSpec> spec_;
  std::shared_ptr<const CompositeMixing> mixing_;
  NetworkOptions options_;
  std::vector<AgentProcess> agents_;
  Mailbox mailbox_;
  std::vector<ReadEvent> log_;
  std::optional<Eigen::VectorXd> reference_;
  ConvergenceTrace trace_;
  std::size_t rounds_ = 0;
};

// One process per agent; agent 0 of each cluster is its representative and
// the only one with inter-cluster links.
Network spawn_network(std::shared_ptr<const ClusterGameSpec> spec,
                      std::shared_ptr<const CompositeMixing> mixing,
                      Eigen::MatrixXd x0, NetworkOptions options = {});

}  // namespace dgt

#endif  // DGT_SIMNET_HPP_
