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

#include "dgt/engine.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <utility>

#include "dgt/error.hpp"

namespace dgt {

void ConvergenceTrace::write_csv(std::ostream& out) const {
  out << "iter,consensus_gap,optimality_gap,tracker_gap,ne_residual\n";
  out << std::setprecision(17);
  for (const auto& r : records_) {
    out << r.iter << ',' << r.consensus_gap << ',' << r.optimality_gap << ','
        << r.tracker_gap << ',' << r.ne_residual << '\n';
  }
}

void ConvergenceTrace::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace to '" + path + "'");
  write_csv(out);
  if (!out) throw IoError("failed while writing '" + path + "'");
}

std::optional<double> ConvergenceTrace::empirical_rate() const {
  if (records_.size() < 2) return std::nullopt;
  const std::size_t last = records_.size() - 1;
  const std::size_t window = std::max<std::size_t>(1, last / 3);
  const double end = records_[last].ne_residual;
  const double start = records_[last - window].ne_residual;
  if (start <= 0.0) return 0.0;
  return std::pow(end / start, 1.0 / static_cast<double>(window));
}

ConvergenceTrace::LogLinearFit ConvergenceTrace::log_residual_fit() const {
  LogLinearFit fit;
  if (records_.size() < 3) return fit;
  const std::size_t last = records_.size() - 1;
  const std::size_t first = last - (2 * last) / 3;
  std::vector<double> xs, ys;
  for (std::size_t t = first; t <= last; ++t) {
    const double r = records_[t].ne_residual;
    if (!(r > 0.0)) continue;
    xs.push_back(static_cast<double>(records_[t].iter));
    ys.push_back(std::log(r));
  }
  fit.points = xs.size();
  if (fit.points < 3) return fit;
  // Centred two-pass sums; the one-pass form cancels badly on long traces.
  const double kd = static_cast<double>(fit.points);
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= kd;
  my /= kd;
  double cov = 0, var_x = 0, var_y = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx, dy = ys[k] - my;
    cov += dx * dy;
    var_x += dx * dx;
    var_y += dy * dy;
  }
  fit.slope = cov / var_x;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = var_y > 0.0 ? (cov * cov) / (var_x * var_y) : 1.0;
  return fit;
}

Eigen::MatrixXd random_estimates(const ClusterGameSpec& spec,
                                 std::uint64_t seed, double low, double high) {
  if (!(high > low)) throw DomainError("initialisation box is empty");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(low, high);
  Eigen::MatrixXd x(spec.agent_count(), spec.total_dim());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = dist(rng);
  }
  return x;
}

Eigen::MatrixXd embed_trackers(const ClusterGameSpec& spec,
                               const std::vector<Eigen::MatrixXd>& trackers) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(spec.agent_count(), spec.total_dim());
  for (int i = 0; i < spec.cluster_count(); ++i) {
    v.block(spec.layout().offset(i), spec.block_offset(i), spec.cluster_size(i),
            spec.strategy_dim(i)) = trackers[i];
  }
  return v;
}

DgtEngine::DgtEngine(std::shared_ptr<const ClusterGameSpec> spec,
                     std::shared_ptr<const CompositeMixing> mixing,
                     Eigen::MatrixXd x0)
    : spec_(std::move(spec)), mixing_(std::move(mixing)), x_(std::move(x0)) {
  if (!spec_ || !mixing_) throw DomainError("engine needs a game and a mixing");
  if (spec_->layout().sizes() != mixing_->layout().sizes()) {
    throw DomainError("game and topology disagree on cluster sizes");
  }
  if (x_.rows() != spec_->agent_count() || x_.cols() != spec_->total_dim()) {
    throw DomainError("initial estimates must be " +
                      std::to_string(spec_->agent_count()) + "x" +
                      std::to_string(spec_->total_dim()));
  }
  if (!x_.allFinite()) throw DomainError("initial estimates are not finite");
  gradients_ = gradients_at(x_);
  trackers_ = gradients_;
  trace_.append(record());
}

void DgtEngine::set_reference(const ConsensualPoint& x_star) {
  if (x_star.values().size() != spec_->total_dim()) {
    throw DomainError("reference point has the wrong dimension");
  }
  reference_ = x_star.values();
  std::vector<TraceRecord> kept = trace_.records();
  kept.back() = record();
  trace_ = ConvergenceTrace();
  for (const auto& r : kept) trace_.append(r);
}

void DgtEngine::check_alpha(double alpha) const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw DomainError("step size must be finite and nonnegative");
  }
}

std::vector<Eigen::MatrixXd> DgtEngine::gradients_at(
    const Eigen::MatrixXd& x) const {
  const ClusterGameSpec& s = *spec_;
  std::vector<Eigen::MatrixXd> out;
  out.reserve(s.cluster_count());
  for (int i = 0; i < s.cluster_count(); ++i) {
    Eigen::MatrixXd g(s.cluster_size(i), s.strategy_dim(i));
    for (int j = 0; j < s.cluster_size(i); ++j) {
      const Eigen::VectorXd row = x.row(s.layout().global({i, j})).transpose();
      g.row(j) = s.gradient_at_row({i, j}, row).transpose();
    }
    out.push_back(std::move(g));
  }
  return out;
}

void DgtEngine::step_compact(double alpha) {
  check_alpha(alpha);
  Eigen::MatrixXd x_next =
      mixing_->matrix() * x_ - alpha * embed_trackers(*spec_, trackers_);
  std::vector<Eigen::MatrixXd> g_next = gradients_at(x_next);
  std::vector<Eigen::MatrixXd> v_next;
  v_next.reserve(trackers_.size());
  for (int i = 0; i < spec_->cluster_count(); ++i) {
    v_next.push_back(mixing_->intra(i).weights() * trackers_[i] + g_next[i] -
                     gradients_[i]);
  }
  commit(std::move(x_next), std::move(v_next), std::move(g_next));
}

void DgtEngine::step_agentwise(double alpha) {
  check_alpha(alpha);
  const ClusterGameSpec& s = *spec_;
  const ClusterLayout& layout = s.layout();
  const GraphTopology& inter = mixing_->inter();

  Eigen::MatrixXd x_next(x_.rows(), x_.cols());
  std::vector<Eigen::MatrixXd> v_next(s.cluster_count());
  std::vector<Eigen::MatrixXd> g_next(s.cluster_count());

  for (int i = 0; i < s.cluster_count(); ++i) {
    const GraphTopology& intra = mixing_->intra(i);
    const int off = s.block_offset(i);
    const int qi = s.strategy_dim(i);
    v_next[i].resize(s.cluster_size(i), qi);
    g_next[i].resize(s.cluster_size(i), qi);

    for (int j = 0; j < s.cluster_size(i); ++j) {
      const AgentId me{i, j};
      const double scale = me.is_representative() ? 0.5 : 1.0;
      Eigen::VectorXd row = scale * intra.weight(j, j) *
                            x_.row(layout.global(me)).transpose();
      for (int l : intra.neighbors(j)) {
        row += scale * intra.weight(j, l) *
               x_.row(layout.global({i, l})).transpose();
      }
      if (me.is_representative()) {
        row += 0.5 * inter.weight(i, i) * x_.row(layout.global(me)).transpose();
        for (int h : inter.neighbors(i)) {
          row += 0.5 * inter.weight(i, h) *
                 x_.row(layout.global({h, 0})).transpose();
        }
      }
      row.segment(off, qi) -= alpha * trackers_[i].row(j).transpose();
      x_next.row(layout.global(me)) = row.transpose();
    }
  }

  for (int i = 0; i < s.cluster_count(); ++i) {
    const GraphTopology& intra = mixing_->intra(i);
    for (int j = 0; j < s.cluster_size(i); ++j) {
      const Eigen::VectorXd row = x_next.row(layout.global({i, j})).transpose();
      g_next[i].row(j) = s.gradient_at_row({i, j}, row).transpose();
      Eigen::RowVectorXd v = intra.weight(j, j) * trackers_[i].row(j);
      for (int l : intra.neighbors(j)) {
        v += intra.weight(j, l) * trackers_[i].row(l);
      }
      v_next[i].row(j) = v + g_next[i].row(j) - gradients_[i].row(j);
    }
  }
  commit(std::move(x_next), std::move(v_next), std::move(g_next));
}

void DgtEngine::step(double alpha, StepMode mode) {
  if (mode == StepMode::kCompact) {
    step_compact(alpha);
  } else {
    step_agentwise(alpha);
  }
}

void DgtEngine::commit(Eigen::MatrixXd x_next,
                       std::vector<Eigen::MatrixXd> v_next,
                       std::vector<Eigen::MatrixXd> g_next) {
  const std::size_t next_iter = iteration_ + 1;
  bool finite = x_next.allFinite();
  for (const auto& v : v_next) finite = finite && v.allFinite();
  if (!finite) throw DivergenceError(next_iter, "non-finite iterate");

  x_ = std::move(x_next);
  trackers_ = std::move(v_next);
  gradients_ = std::move(g_next);
  iteration_ = next_iter;
  const TraceRecord r = record();
  trace_.append(r);
  if (!std::isfinite(r.ne_residual) || r.ne_residual > kDivergenceResidual) {
    throw DivergenceError(next_iter, "NE residual exceeded 1e12");
  }
}

RunSummary DgtEngine::run(double alpha, const StopCriteria& stop,
                          StepMode mode) {
  if (!(alpha > 0.0)) throw DomainError("step size must be positive");
  if (std::isnan(stop.residual_tol) || stop.residual_tol < 0.0) {
    throw DomainError("residual tolerance must be nonnegative");
  }
  RunSummary summary;
  while (trace_.back().ne_residual > stop.residual_tol &&
         summary.iterations < stop.max_iters) {
    step(alpha, mode);
    ++summary.iterations;
  }
  summary.final_residual = trace_.back().ne_residual;
  summary.converged = summary.final_residual <= stop.residual_tol;
  summary.empirical_rate = trace_.empirical_rate();
  return summary;
}

Eigen::VectorXd DgtEngine::pi_average() const {
  return (mixing_->pi().transpose() * x_).transpose();
}

Eigen::VectorXd DgtEngine::own_strategies() const {
  const ClusterGameSpec& s = *spec_;
  Eigen::VectorXd out(s.stacked_dim());
  Eigen::Index pos = 0;
  for (int i = 0; i < s.cluster_count(); ++i) {
    const int qi = s.strategy_dim(i);
    for (int j = 0; j < s.cluster_size(i); ++j) {
      out.segment(pos, qi) =
          x_.row(s.layout().global({i, j})).segment(s.block_offset(i), qi);
      pos += qi;
    }
  }
  return out;
}

XiMetrics DgtEngine::xi_metrics(const ConsensualPoint& x_star) const {
  if (x_star.values().size() != spec_->total_dim()) {
    throw DomainError("reference point has the wrong dimension");
  }
  const Eigen::VectorXd avg = pi_average();
  const Eigen::Index n = x_.rows();
  XiMetrics xi;
  xi.consensus = weighted_fro_norm(
      x_ - Eigen::VectorXd::Ones(n) * avg.transpose(), mixing_->pi());
  xi.optimality = std::sqrt(static_cast<double>(n)) * (avg - x_star.values()).norm();
  for (const auto& v : trackers_) {
    const Eigen::RowVectorXd mean = v.colwise().mean();
    xi.tracker += (v.rowwise() - mean).norm();
  }
  return xi;
}

double DgtEngine::conservation_residual() const {
  const std::vector<Eigen::MatrixXd> fresh = gradients_at(x_);
  double worst = 0.0;
  for (std::size_t i = 0; i < trackers_.size(); ++i) {
    const double gap =
        (trackers_[i].colwise().sum() - fresh[i].colwise().sum()).norm();
    worst = std::max(worst, gap / (1.0 + trackers_[i].norm()));
  }
  return worst;
}

double DgtEngine::max_intra_cluster_spread() const {
  const ClusterGameSpec& s = *spec_;
  double worst = 0.0;
  for (int i = 0; i < s.cluster_count(); ++i) {
    const int off = s.layout().offset(i);
    for (int j = 0; j < s.cluster_size(i); ++j) {
      for (int l = j + 1; l < s.cluster_size(i); ++l) {
        worst = std::max(worst, (x_.row(off + j) - x_.row(off + l)).norm());
      }
    }
  }
  return worst;
}

TraceRecord measure_state(const ClusterGameSpec& spec,
                          const CompositeMixing& mixing,
                          const Eigen::MatrixXd& x,
                          const std::vector<Eigen::MatrixXd>& trackers,
                          const std::optional<Eigen::VectorXd>& reference,
                          std::size_t iter) {
  TraceRecord r;
  r.iter = iter;
  const Eigen::VectorXd avg = (mixing.pi().transpose() * x).transpose();
  const Eigen::Index n = x.rows();
  r.consensus_gap = weighted_fro_norm(
      x - Eigen::VectorXd::Ones(n) * avg.transpose(), mixing.pi());
  r.optimality_gap =
      reference ? std::sqrt(static_cast<double>(n)) * (avg - *reference).norm()
                : std::numeric_limits<double>::quiet_NaN();
  for (const auto& v : trackers) {
    const Eigen::RowVectorXd mean = v.colwise().mean();
    r.tracker_gap += (v.rowwise() - mean).norm();
  }
  r.ne_residual = avg.allFinite()
                      ? cluster_gradient_sums(spec, avg).norm()
                      : std::numeric_limits<double>::infinity();
  return r;
}

TraceRecord DgtEngine::record() const {
  return measure_state(*spec_, *mixing_, x_, trackers_, reference_, iteration_);
}

}  // namespace dgt
