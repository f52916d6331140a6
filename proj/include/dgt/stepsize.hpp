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

#ifndef DGT_STEPSIZE_HPP_
#define DGT_STEPSIZE_HPP_

#include <Eigen/Dense>

#include "dgt/game.hpp"
#include "dgt/topology.hpp"

namespace dgt {

// Coefficients of the 3x3 gain matrix that bounds the joint evolution of the
// consensus, optimality and tracking errors.
struct GainConstants {
  double sigma = 0.0;
  double sigma_max = 0.0;
  double a1 = 0.0;
  double a11 = 0.0, a12 = 0.0, a13 = 0.0;
  double a21 = 0.0, a23 = 0.0;
  double a31 = 0.0, a32 = 0.0, a33 = 0.0;
  double lipschitz = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  int m = 0;
  int n = 0;
  double pi_min = 0.0;            // 1/(n+m)
  double pi_max = 0.0;            // 2/(n+m)
  double norm_limit = 0.0;        // ||1 pi^T|| = sqrt(n) ||pi||
  double norm_id_minus_limit = 0.0;  // ||I - 1 pi^T||
  double norm_mix_minus_id = 0.0;    // ||A - I||

  // (m+n) / (2 (mu1 + mu2)); keeps the square root in phi real.
  double radicand_bound() const;
};

GainConstants gain_constants(const CompositeMixing& mixing,
                             const GameConstants& game);

// phi(alpha) = sqrt(1 - 2 alpha (mu1+mu2)/(m+n) + alpha^2 L ||A_inf||^2).
double phi_entry(double alpha, const GainConstants& c);

// Throws DomainError unless 0 <= alpha <= radicand_bound().
Eigen::Matrix3d phi_matrix(double alpha, const GainConstants& c);

// det(I - Phi(alpha)), evaluated with 1 - phi written without cancellation.
double gain_determinant(double alpha, const GainConstants& c);

// Largest eigenvalue modulus from the closed-form roots of the characteristic
// cubic, with Newton polishing of the real root.
double spectral_radius_3x3(const Eigen::Matrix3d& m);

struct AlphaStar {
  double value = 0.0;
  // No sign change below the radicand bound; value is that bound.
  bool bound_limited = false;
  // rho(Phi(a - eps)) < 1 <= rho(Phi(a + eps)) with eps = 1e-6 a.
  bool verified = false;
};

// Smallest positive root of det(I - Phi(alpha)) = 0: scan upward in steps of
// 1e-4 of the radicand bound, then bisect to 1e-12 relative width. Requires
// a1 > 0 (PreconditionError otherwise).
AlphaStar alpha_star(const GainConstants& c);

struct StepBound {
  AlphaStar alpha_star;
  double radicand_bound = 0.0;
  double max_step = 0.0;  // min(alpha*, radicand bound)
  bool limited_by_alpha_star() const {
    return !alpha_star.bound_limited && alpha_star.value < radicand_bound;
  }
};

StepBound max_step(const GainConstants& c);

}  // namespace dgt

#endif  // DGT_STEPSIZE_HPP_
