// SPDX-License-Identifier: Apache-2.0
#include "dires/resonance.hpp"

#include <cmath>
#include <stdexcept>

namespace dires {

namespace {

double weighted_norm(const Mesh& mesh, const Eigen::VectorXcd& v) {
  double s = 0.0;
  for (int i = 0; i < mesh.size(); ++i) s += mesh.weights[i] * std::norm(v[i]);
  return std::sqrt(s);
}

}  // namespace

ResonancePoint solve_linear(const KernelCache& cache, double tau, Complex omega_guess,
                            const Eigen::VectorXcd& u_guess, const LinearSolveOptions& opts) {
  const Mesh& mesh = cache.mesh();
  const int n = mesh.size();
  if (u_guess.size() != n) throw std::invalid_argument("solve_linear: guess size mismatch");
  if (!(tau > 0.0)) throw std::invalid_argument("solve_linear: tau must be positive");

  Complex omega = omega_guess;
  Eigen::VectorXcd u = u_guess / weighted_norm(mesh, u_guess);
  Eigen::MatrixXcd K, dK;
  Eigen::MatrixXcd J(n + 1, n + 1);
  Eigen::VectorXcd rhs(n + 1);
  double resn = 0.0;

  for (int it = 0; it < opts.max_iter; ++it) {
    cache.fill_helmholtz(omega, K);
    const Complex s = tau * omega * omega;
    const Eigen::VectorXcd Ku = K * u;
    const Eigen::VectorXcd r = u - s * Ku;
    resn = weighted_norm(mesh, r);
    const double un = weighted_norm(mesh, u);
    if (resn <= opts.tol * un) {
      u /= un;
      ResonancePoint pt;
      pt.omega = omega;
      pt.omega_hat = std::sqrt(tau) * omega;
      pt.tau = tau;
      pt.u = Field(mesh, u);
      pt.residual = resn / un;
      pt.amplitude = 1.0;
      pt.symmetry = mesh.symmetric() ? symmetry_class(pt.u, 1e-6) : Symmetry::None;
      pt.kind = ResonancePoint::Kind::Linear;
      if (!(pt.omega.imag() < opts.im_margin))
        throw std::runtime_error("solve_linear: spurious resonance with Im omega >= 0 rejected");
      return pt;
    }

    cache.fill_helmholtz_domega(omega, dK);
    J.topLeftCorner(n, n) = -s * K;
    J.topLeftCorner(n, n).diagonal().array() += 1.0;
    J.block(0, n, n, 1) = -tau * (2.0 * omega * Ku + omega * omega * (dK * u));
    // normalization row: weighted <u/||u||, u> = 1
    for (int i = 0; i < n; ++i) J(n, i) = mesh.weights[i] * std::conj(u[i]) / un;
    J(n, n) = 0.0;
    rhs.head(n) = -r;
    rhs[n] = 1.0 - un;
    const Eigen::VectorXcd dx = J.partialPivLu().solve(rhs);
    u += dx.head(n);
    omega += dx[n];
  }
  throw std::runtime_error("solve_linear: no convergence after " + std::to_string(opts.max_iter) +
                           " iterations, last residual " + std::to_string(resn));
}

ResonancePoint solve_linear(const Mesh& mesh, double tau, Complex omega_guess,
                            const Field& u_guess, const LinearSolveOptions& opts) {
  KernelCache cache(mesh);
  return solve_linear(cache, tau, omega_guess, u_guess.values, opts);
}

Complex asymptotic_linear_3d(const SpectralPair& pair, const Mesh& mesh, double tau) {
  double integral = 0.0;
  for (int i = 0; i < mesh.size(); ++i) integral += mesh.weights[i] * pair.phi[i];
  const double lam = pair.lambda;
  return Complex(1.0 / std::sqrt(lam * tau),
                 -integral * integral / (8.0 * kPi * lam * lam * tau));
}

double asymptotic_linear_2d_principal(double area, double tau) {
  return std::sqrt(4.0 * kPi / (area * tau * std::log(tau)));
}

double asymptotic_linear_2d_principal_refined(double area, double tau) {
  const double eps = 1.0 / std::sqrt(tau);
  return principal_2d_leading(eps, area) / std::sqrt(tau);
}

double asymptotic_linear_2d_bulk(double mu_j, double tau) {
  return 1.0 / std::sqrt(tau * mu_j);
}

}  // namespace dires
