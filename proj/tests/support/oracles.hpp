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

// Reference computations used by the tests. They deliberately avoid the
// library's numerical code paths: eigenvalues by cyclic Jacobi rotations,
// stationary vectors by power iteration, Perron roots by Collatz-Wielandt
// bracketing and the Cournot equilibrium from its closed form.

#ifndef DGT_TESTS_SUPPORT_ORACLES_HPP_
#define DGT_TESTS_SUPPORT_ORACLES_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace dgt::testing {

// Eigenvalues of a symmetric matrix, ascending.
inline Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Eigen::VectorXd d = a.diagonal();
  std::sort(d.data(), d.data() + d.size());
  return d;
}

inline double oracle_spectral_norm(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd ev = jacobi_eigenvalues(m.transpose() * m);
  return std::sqrt(std::max(0.0, ev(ev.size() - 1)));
}

// Left Perron vector of a row-stochastic matrix with positive diagonal,
// normalised to sum one.
inline Eigen::VectorXd power_left_eigenvector(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 1.0 / n);
  const Eigen::MatrixXd at = a.transpose();
  for (int it = 0; it < 2000000; ++it) {
    Eigen::VectorXd next = at * p;
    next /= next.sum();
    const double change = (next - p).lpNorm<Eigen::Infinity>();
    p = next;
    if (change < 1e-16) break;
  }
  return p;
}

// Perron root of a nonnegative irreducible matrix: power iteration until the
// Collatz-Wielandt lower and upper bounds meet.
inline double perron_root(const Eigen::MatrixXd& m) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(m.rows());
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 5000000 && (std::isinf(hi) || hi - lo > 1e-15 * hi); ++it) {
    const Eigen::VectorXd y = m * x;
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      lo = std::min(lo, y(k) / x(k));
      hi = std::max(hi, y(k) / x(k));
    }
    x = y / y.maxCoeff();
  }
  return 0.5 * (lo + hi);
}

// Consensual Cournot equilibrium with uniform inter-cluster weight w = 1/m:
// (2 quad + w) x_c + w S = (intercept - lin) c for clusters c = 1..m.
inline std::vector<double> cournot_closed_form(int m, double quad, double lin,
                                               double intercept) {
  const double w = 1.0 / m;
  const double k = intercept - lin;
  const double s = k * m * (m + 1) / 2.0 / (2.0 * quad + w + m * w);
  std::vector<double> x;
  for (int c = 1; c <= m; ++c) x.push_back((k * c - w * s) / (2.0 * quad + w));
  return x;
}

// Central difference of a scalar function of one variable.
inline double central_difference(const std::function<double(double)>& f,
                                 double x) {
  const double h = 1e-6 * (1.0 + std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Connected random edge set: a random spanning tree plus extra edges.
struct RandomGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

inline RandomGraph random_connected_graph(int n, std::mt19937_64& rng,
                                          double extra_density = 0.3) {
  RandomGraph g;
  g.n = n;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> parent(0, v - 1);
    g.edges.push_back({parent(rng), v});
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 2; b < n; ++b) {
      if (u(rng) < extra_density) g.edges.push_back({a, b});
    }
  }
  return g;
}

}  // namespace dgt::testing

#endif  // DGT_TESTS_SUPPORT_ORACLES_HPP_
