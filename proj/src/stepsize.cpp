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

#include "dgt/stepsize.hpp"

#include <algorithm>
#include <cmath>

#include "dgt/error.hpp"
#include "dgt/linalg.hpp"

namespace dgt {
namespace {

constexpr double kScanFraction = 1e-4;
constexpr double kBisectRelWidth = 1e-12;
constexpr double kCrossCheckRel = 1e-6;

// 1 - phi(alpha) as (1 - phi^2) / (1 + phi).
double one_minus_phi(double alpha, const GainConstants& c) {
  const double drop =
      2.0 * alpha * (c.mu1 + c.mu2) / (c.m + c.n) -
      alpha * alpha * c.lipschitz * c.norm_limit * c.norm_limit;
  return drop / (1.0 + phi_entry(alpha, c));
}

void check_alpha(double alpha, const GainConstants& c) {
  if (!(alpha >= 0.0) || alpha > c.radicand_bound()) {
    throw DomainError("step size " + std::to_string(alpha) +
                      " outside [0, " + std::to_string(c.radicand_bound()) +
                      "]");
  }
}

// Monic cubic x^3 + b x^2 + c x + d.
struct Cubic {
  double b, c, d;
};

// One real root of the cubic from Cardano / the trigonometric form.
double real_cubic_root(const Cubic& k) {
  const double shift = k.b / 3.0;
  const double p = k.c - k.b * k.b / 3.0;
  const double q = 2.0 * k.b * k.b * k.b / 27.0 - k.b * k.c / 3.0 + k.d;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  double t;
  if (disc > 0.0 || p == 0.0) {
    const double s = std::sqrt(std::max(disc, 0.0));
    t = std::cbrt(-0.5 * q + s) + std::cbrt(-0.5 * q - s);
  } else {
    // Three real roots; take the largest.
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
    t = r * std::cos(std::acos(arg) / 3.0);
  }
  return t - shift;
}

// Newton on det(x I - M) evaluated from the shifted entries rather than the
// expanded coefficients, which lose accuracy when eigenvalues cluster.
double polish(const Eigen::Matrix3d& m, double x) {
  auto det_and_slope = [&m](double lam, double& slope) {
    const Eigen::Matrix3d s = lam * Eigen::Matrix3d::Identity() - m;
    slope = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0) + s(0, 0) * s(2, 2) -
            s(0, 2) * s(2, 0) + s(1, 1) * s(2, 2) - s(1, 2) * s(2, 1);
    return s.determinant();
  };
  for (int it = 0; it < 50; ++it) {
    double slope = 0.0;
    const double f = det_and_slope(x, slope);
    if (slope == 0.0) break;
    const double dx = f / slope;
    x -= dx;
    if (std::abs(dx) <= 1e-12 * (1.0 + std::abs(x))) {
      // One extra step to land on the floating-point root.
      const double f2 = det_and_slope(x, slope);
      if (slope != 0.0) x -= f2 / slope;
      break;
    }
  }
  return x;
}

}  // namespace

double GainConstants::radicand_bound() const {
  return (m + n) / (2.0 * (mu1 + mu2));
}

GainConstants gain_constants(const CompositeMixing& mixing,
                             const GameConstants& game) {
  if (!(game.lipschitz > 0.0) || !(game.mu1 > 0.0) || !(game.mu2 > 0.0)) {
    throw DomainError("L, mu1 and mu2 must all be positive");
  }
  GainConstants c;
  c.m = mixing.cluster_count();
  c.n = mixing.agent_count();
  c.lipschitz = game.lipschitz;
  c.mu1 = game.mu1;
  c.mu2 = game.mu2;
  c.sigma = mixing.sigma();
  c.sigma_max = mixing.sigma_max();
  c.pi_min = 1.0 / (c.n + c.m);
  c.pi_max = 2.0 / (c.n + c.m);
  c.norm_limit = std::sqrt(static_cast<double>(c.n)) * mixing.pi().norm();

  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(c.n, c.n);
  c.norm_id_minus_limit = spectral_norm(id - mixing.limit_matrix());
  c.norm_mix_minus_id = spectral_norm(mixing.matrix() - id);

  const double L = c.lipschitz;
  const double sqrt_m = std::sqrt(static_cast<double>(c.m));
  const double inv_sqrt_pi_min = 1.0 / std::sqrt(c.pi_min);
  const double sqrt_pi_max = std::sqrt(c.pi_max);

  c.a1 = L * sqrt_m * c.norm_mix_minus_id * inv_sqrt_pi_min;
  c.a11 = sqrt_pi_max * c.norm_id_minus_limit * L * sqrt_m * inv_sqrt_pi_min;
  c.a12 = sqrt_pi_max * c.norm_id_minus_limit * L * sqrt_m;
  c.a13 = sqrt_pi_max * c.norm_id_minus_limit;
  c.a21 = L * c.norm_limit * inv_sqrt_pi_min;
  c.a23 = c.norm_limit;
  c.a31 = L * L * c.m * inv_sqrt_pi_min;
  c.a32 = L * L * c.m;
  c.a33 = L * sqrt_m;
  return c;
}

double phi_entry(double alpha, const GainConstants& c) {
  const double radicand =
      1.0 - 2.0 * alpha * (c.mu1 + c.mu2) / (c.m + c.n) +
      alpha * alpha * c.lipschitz * c.norm_limit * c.norm_limit;
  return std::sqrt(std::max(radicand, 0.0));
}

Eigen::Matrix3d phi_matrix(double alpha, const GainConstants& c) {
  check_alpha(alpha, c);
  Eigen::Matrix3d phi;
  phi << c.sigma + alpha * c.a11, alpha * c.a12, alpha * c.a13,
      alpha * c.a21, phi_entry(alpha, c), alpha * c.a23,
      c.a1 + alpha * c.a31, alpha * c.a32, c.sigma_max + alpha * c.a33;
  return phi;
}

double gain_determinant(double alpha, const GainConstants& c) {
  check_alpha(alpha, c);
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity() - phi_matrix(alpha, c);
  m(1, 1) = one_minus_phi(alpha, c);
  return m.determinant();
}

double spectral_radius_3x3(const Eigen::Matrix3d& m) {
  // Characteristic polynomial x^3 - tr x^2 + (sum of principal minors) x - det.
  const double tr = m.trace();
  const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) +
                        m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                        m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  const Cubic k{-tr, minors, -m.determinant()};

  const double r = polish(m, real_cubic_root(k));
  // Deflate: (x - r)(x^2 + bb x + cc).
  const double bb = k.b + r;
  const double cc = k.c + r * bb;
  const double disc = bb * bb - 4.0 * cc;
  double rho = std::abs(r);
  if (disc < 0.0) {
    rho = std::max(rho, std::sqrt(std::max(cc, 0.0)));
  } else {
    const double s = std::sqrt(disc);
    const double big = bb >= 0.0 ? -0.5 * (bb + s) : -0.5 * (bb - s);
    double x1 = big;
    double x2 = big != 0.0 ? cc / big : 0.0;
    x1 = polish(m, x1);
    x2 = polish(m, x2);
    rho = std::max({rho, std::abs(x1), std::abs(x2)});
  }
  return rho;
}

AlphaStar alpha_star(const GainConstants& c) {
  if (!(c.a1 > 0.0)) {
    throw PreconditionError(
        "gain matrix is reducible (a1 = 0); alpha* is undefined");
  }
  const double bound = c.radicand_bound();
  const double step = kScanFraction * bound;
  const int steps = static_cast<int>(std::lround(1.0 / kScanFraction));

  AlphaStar out;
  double lo = 0.0;
  double hi = -1.0;
  for (int k = 1; k <= steps; ++k) {
    const double a = k == steps ? bound : k * step;
    if (gain_determinant(a, c) <= 0.0) {
      hi = a;
      break;
    }
    lo = a;
  }
  if (hi < 0.0) {
    out.value = bound;
    out.bound_limited = true;
    return out;
  }
  while (hi - lo > kBisectRelWidth * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (gain_determinant(mid, c) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.value = 0.5 * (lo + hi);
  const double eps = kCrossCheckRel * out.value;
  const double below = spectral_radius_3x3(phi_matrix(out.value - eps, c));
  const double above_alpha = std::min(out.value + eps, bound);
  const double above = spectral_radius_3x3(phi_matrix(above_alpha, c));
  out.verified = below < 1.0 && above >= 1.0;
  return out;
}

StepBound max_step(const GainConstants& c) {
  StepBound out;
  out.radicand_bound = c.radicand_bound();
  out.alpha_star = alpha_star(c);
  out.max_step = std::min(out.alpha_star.value, out.radicand_bound);
  return out;
}

}  // namespace dgt
