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

#include "dgt/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <utility>

#include "dgt/error.hpp"

namespace dgt {
namespace {

std::string name(AgentId id) {
  return "(" + std::to_string(id.cluster) + "," + std::to_string(id.agent) +
         ")";
}

}  // namespace

Mailbox::Mailbox(ClusterLayout layout)
    : layout_(std::move(layout)), slots_(layout_.agent_count()) {}

void Mailbox::post(RoundMessage msg) {
  auto& slot = slots_.at(layout_.global(msg.sender));
  if (slot) throw ProtocolError("duplicate message from " + name(msg.sender));
  slot = std::move(msg);
}

void Mailbox::clear() {
  for (auto& slot : slots_) slot.reset();
}

bool Mailbox::has(AgentId sender) const {
  return slots_[layout_.global(sender)].has_value();
}

const RoundMessage& Mailbox::lookup(AgentId sender) const {
  const auto& slot = slots_[layout_.global(sender)];
  if (!slot) {
    throw ProtocolError("no message from " + name(sender) + " in round " +
                        std::to_string(round_));
  }
  return *slot;
}

const Eigen::VectorXd& Mailbox::estimate(AgentId reader, AgentId sender,
                                         std::vector<ReadEvent>* log) const {
  const RoundMessage& msg = lookup(sender);
  if (log) log->push_back({round_, reader, sender, false});
  return msg.estimate;
}

const Eigen::VectorXd& Mailbox::tracker(AgentId reader, AgentId sender,
                                        std::vector<ReadEvent>* log) const {
  if (reader.cluster != sender.cluster) {
    throw ProtocolError("tracker of " + name(sender) + " read across clusters by " +
                        name(reader));
  }
  const RoundMessage& msg = lookup(sender);
  if (log) log->push_back({round_, reader, sender, true});
  return msg.tracker;
}

AgentProcess::AgentProcess(AgentId id,
                           std::shared_ptr<const ClusterGameSpec> spec,
                           double self_weight, std::vector<Link> intra,
                           double inter_self_weight, std::vector<Link> inter,
                           Eigen::VectorXd estimate)
    : id_(id),
      spec_(std::move(spec)),
      self_weight_(self_weight),
      intra_(std::move(intra)),
      inter_self_weight_(inter_self_weight),
      inter_(std::move(inter)),
      estimate_(std::move(estimate)) {
  if (!id_.is_representative() && (!inter_.empty() || inter_self_weight_ != 0.0)) {
    throw TopologyError("non-representative " + name(id_) +
                        " cannot have inter-cluster links");
  }
  if (estimate_.size() != spec_->total_dim()) {
    throw DomainError("initial estimate of " + name(id_) +
                      " has the wrong dimension");
  }
  gradient_ = spec_->gradient_at_row(id_, estimate_);
  tracker_ = gradient_;
}

RoundMessage AgentProcess::publish() const {
  return {id_, estimate_, tracker_};
}

void AgentProcess::update(const Mailbox& inbox, double alpha,
                          std::vector<ReadEvent>* log) {
  const int i = id_.cluster;
  const double scale = is_representative() ? 0.5 : 1.0;

  Eigen::VectorXd next = scale * self_weight_ * estimate_;
  for (const Link& l : intra_) {
    next += scale * l.weight * inbox.estimate(id_, {i, l.peer}, log);
  }
  if (is_representative()) {
    next += 0.5 * inter_self_weight_ * estimate_;
    for (const Link& h : inter_) {
      next += 0.5 * h.weight * inbox.estimate(id_, {h.peer, 0}, log);
    }
  }
  next.segment(spec_->block_offset(i), spec_->strategy_dim(i)) -=
      alpha * tracker_;

  Eigen::VectorXd fresh = spec_->gradient_at_row(id_, next);
  Eigen::VectorXd v = self_weight_ * tracker_;
  for (const Link& l : intra_) {
    v += l.weight * inbox.tracker(id_, {i, l.peer}, log);
  }
  tracker_ = v + fresh - gradient_;
  gradient_ = std::move(fresh);
  estimate_ = std::move(next);
}

Network::Network(std::shared_ptr<const ClusterGameSpec> spec,
                 std::shared_ptr<const CompositeMixing> mixing,
                 Eigen::MatrixXd x0, NetworkOptions options)
    : spec_(std::move(spec)),
      mixing_(std::move(mixing)),
      options_(options),
      mailbox_(mixing_->layout()) {
  if (!spec_ || !mixing_) throw DomainError("network needs a game and topology");
  if (spec_->cluster_count() != mixing_->cluster_count() ||
      spec_->agent_count() != mixing_->agent_count()) {
    throw DomainError("game and topology disagree on cluster sizes");
  }
  for (int i = 0; i < spec_->cluster_count(); ++i) {
    if (spec_->cluster_size(i) != mixing_->layout().size(i)) {
      throw DomainError("game and topology disagree on cluster sizes");
    }
  }
  if (x0.rows() != spec_->agent_count() || x0.cols() != spec_->total_dim()) {
    throw DomainError("initial estimates must be n x q");
  }
  if (options_.threads < 1) throw DomainError("thread count must be positive");

  const GraphTopology& inter = mixing_->inter();
  const ClusterLayout& layout = mixing_->layout();
  for (int i = 0; i < spec_->cluster_count(); ++i) {
    const GraphTopology& intra = mixing_->intra(i);
    for (int j = 0; j < spec_->cluster_size(i); ++j) {
      const AgentId id{i, j};
      std::vector<AgentProcess::Link> intra_links;
      for (int l : intra.neighbors(j)) intra_links.push_back({l, intra.weight(j, l)});
      std::vector<AgentProcess::Link> inter_links;
      double inter_self = 0.0;
      if (id.is_representative()) {
        inter_self = inter.weight(i, i);
        for (int h : inter.neighbors(i)) inter_links.push_back({h, inter.weight(i, h)});
      }
      agents_.emplace_back(id, spec_, intra.weight(j, j), std::move(intra_links),
                           inter_self, std::move(inter_links),
                           x0.row(layout.global(id)).transpose());
    }
  }
  trace_.append(record());
}

void Network::round(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw DomainError("step size must be finite and nonnegative");
  }
  mailbox_.clear();
  mailbox_.set_round(rounds_ + 1);
  for (const AgentProcess& a : agents_) mailbox_.post(a.publish());
  // Barrier: every message of this round is posted before any update.

  const int n = static_cast<int>(agents_.size());
  const int workers = std::min(options_.threads, n);
  std::vector<std::vector<ReadEvent>> logs(n);
  auto work = [&](int begin, int end) {
    for (int k = begin; k < end; ++k) {
      agents_[k].update(mailbox_, alpha, options_.log_reads ? &logs[k] : nullptr);
    }
  };
  if (workers <= 1) {
    work(0, n);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(n, begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  if (options_.log_reads) {
    for (auto& l : logs) log_.insert(log_.end(), l.begin(), l.end());
  }

  ++rounds_;
  bool finite = true;
  for (const AgentProcess& a : agents_) {
    finite = finite && a.estimate().allFinite() && a.tracker().allFinite();
  }
  if (!finite) throw DivergenceError(rounds_, "non-finite iterate");
  const TraceRecord r = record();
  trace_.append(r);
  if (!std::isfinite(r.ne_residual) || r.ne_residual > kDivergenceResidual) {
    throw DivergenceError(rounds_, "NE residual exceeded 1e12");
  }
}

RunSummary Network::run(double alpha, const StopCriteria& stop) {
  if (!(alpha > 0.0)) throw DomainError("step size must be positive");
  RunSummary summary;
  while (trace_.back().ne_residual > stop.residual_tol &&
         summary.iterations < stop.max_iters) {
    round(alpha);
    ++summary.iterations;
  }
  summary.final_residual = trace_.back().ne_residual;
  summary.converged = summary.final_residual <= stop.residual_tol;
  summary.empirical_rate = trace_.empirical_rate();
  return summary;
}

void Network::set_reference(const ConsensualPoint& x_star) {
  if (x_star.values().size() != spec_->total_dim()) {
    throw DomainError("reference point has the wrong dimension");
  }
  reference_ = x_star.values();
  std::vector<TraceRecord> kept = trace_.records();
  kept.back() = record();
  trace_ = ConvergenceTrace();
  for (const auto& r : kept) trace_.append(r);
}

Eigen::MatrixXd Network::estimates() const {
  Eigen::MatrixXd x(agents_.size(), spec_->total_dim());
  for (const AgentProcess& a : agents_) {
    x.row(mixing_->layout().global(a.id())) = a.estimate().transpose();
  }
  return x;
}

std::vector<Eigen::MatrixXd> Network::trackers() const {
  std::vector<Eigen::MatrixXd> out;
  for (int i = 0; i < spec_->cluster_count(); ++i) {
    out.emplace_back(spec_->cluster_size(i), spec_->strategy_dim(i));
  }
  for (const AgentProcess& a : agents_) {
    out[a.id().cluster].row(a.id().agent) = a.tracker().transpose();
  }
  return out;
}

TraceRecord Network::record() const {
  return measure_state(*spec_, *mixing_, estimates(), trackers(), reference_,
                       rounds_);
}

Network spawn_network(std::shared_ptr<const ClusterGameSpec> spec,
                      std::shared_ptr<const CompositeMixing> mixing,
                      Eigen::MatrixXd x0, NetworkOptions options) {
  return Network(std::move(spec), std::move(mixing), std::move(x0), options);
}

}  // namespace dgt
