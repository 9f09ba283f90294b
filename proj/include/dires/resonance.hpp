// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "dires/mesh.hpp"
#include "dires/potential.hpp"
#include "dires/spectra.hpp"

namespace dires {

struct ResonancePoint {
  Complex omega = 0.0;
  Complex omega_hat = 0.0;  // sqrt(tau) * omega
  double tau = 0.0;
  Field u;
  double residual = 0.0;
  double amplitude = 0.0;  // N = ||u||^2
  Symmetry symmetry = Symmetry::None;
  enum class Kind { Linear, Nonlinear } kind = Kind::Linear;
};

struct LinearSolveOptions {
  double tol = 1e-10;       // relative residual ||u - tau w^2 K u|| <= tol ||u||
  int max_iter = 50;
  double im_margin = -1e-12;  // accept only Im omega < im_margin
};

// Newton iteration on the bordered characteristic-value system
// (u - tau omega^2 K^omega[u], <c, u> - 1) with c the previous normalized
// iterate; K^omega and its omega-derivative are refilled from the kernel
// cache at each update.
ResonancePoint solve_linear(const KernelCache& cache, double tau, Complex omega_guess,
                            const Eigen::VectorXcd& u_guess, const LinearSolveOptions& opts = {});
ResonancePoint solve_linear(const Mesh& mesh, double tau, Complex omega_guess,
                            const Field& u_guess, const LinearSolveOptions& opts = {});

// Two-term 3D expansion omega = 1/sqrt(lambda_j tau) - i (int phi_j)^2/(8 pi lambda_j^2 tau).
Complex asymptotic_linear_3d(const SpectralPair& pair, const Mesh& mesh, double tau);

// 2D leading-order values.
double asymptotic_linear_2d_principal(double area, double tau);  // sqrt(4 pi/(|D| tau ln tau))
// Lambert-W refined scaled value mapped back: omega_hat_0(eps)/sqrt(tau).
double asymptotic_linear_2d_principal_refined(double area, double tau);
double asymptotic_linear_2d_bulk(double mu_j, double tau);  // 1/sqrt(tau mu_j)

}  // namespace dires
