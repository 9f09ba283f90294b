// SPDX-License-Identifier: Apache-2.0
#include "dires/nonlinear.hpp"

#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace dires {

namespace {

double weighted_norm(const Mesh& mesh, const Eigen::VectorXcd& v) {
  double s = 0.0;
  for (int i = 0; i < mesh.size(); ++i) s += mesh.weights[i] * std::norm(v[i]);
  return std::sqrt(s);
}

Complex weighted_inner(const Mesh& mesh, const Eigen::VectorXd& f, const Eigen::VectorXcd& g) {
  Complex s = 0.0;
  for (int i = 0; i < mesh.size(); ++i) s += mesh.weights[i] * f[i] * g[i];
  return s;
}

}  // namespace

Eigen::VectorXcd kerr_map(const Eigen::VectorXcd& u) {
  Eigen::VectorXcd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = u[i] + std::norm(u[i]) * u[i];
  return out;
}

Field kerr_map(const Field& u) { return Field(*u.mesh, kerr_map(u.values)); }

Field nl_residual(const Mesh& mesh, double tau, Complex omega, const Field& u) {
  const OperatorMatrix K = assemble_helmholtz(mesh, omega);
  const Complex s = tau * omega * omega;
  return Field(mesh, u.values - s * (K.entries * kerr_map(u.values)));
}

ResonancePoint solve_nonlinear(const KernelCache& cache, double tau,
                               const Eigen::VectorXd& gauge_field, PinKind pin,
                               const Eigen::VectorXd& pin_field, double pin_value,
                               Complex omega0, const Eigen::VectorXcd& u0,
                               const NonlinearConfig& config) {
  const Mesh& mesh = cache.mesh();
  const int n = mesh.size();
  if (u0.size() != n || gauge_field.size() != n)
    throw std::invalid_argument("solve_nonlinear: size mismatch");

  Complex omega = omega0;
  Eigen::VectorXcd u = u0;
  Eigen::MatrixXcd K, dK;
  Eigen::MatrixXd J(2 * n + 2, 2 * n + 2);
  Eigen::VectorXd rhs(2 * n + 2);
  double resn = 0.0;

  for (int it = 0; it < config.max_iter; ++it) {
    cache.fill_helmholtz(omega, K);
    const Complex s = tau * omega * omega;
    const Eigen::MatrixXcd A = s * K;
    const Eigen::VectorXcd Nu = kerr_map(u);
    const Eigen::VectorXcd F = u - A * Nu;

    const double nu = weighted_norm(mesh, u);
    const double g1 = weighted_inner(mesh, gauge_field, u).imag();
    double g2, pin_scale;
    if (pin == PinKind::Amplitude) {
      g2 = nu * nu - pin_value;
      pin_scale = std::max(pin_value, 1e-12);
    } else {
      g2 = weighted_inner(mesh, pin_field, u).real() - pin_value;
      pin_scale = std::max(std::abs(pin_value), std::max(nu, 1e-12));
    }
    resn = weighted_norm(mesh, F);
    if (resn <= config.newton_tol * std::max(nu, 1e-14) &&
        std::abs(g1) <= 10 * config.newton_tol * std::max(nu, 1e-14) &&
        std::abs(g2) <= 10 * config.newton_tol * pin_scale) {
      const Complex coef = weighted_inner(mesh, gauge_field, u);
      if (std::abs(coef) < 1e-12 * std::max(nu, 1e-14))
        throw std::runtime_error("solve_nonlinear: gauge mode orthogonal to state, reseed");
      if (coef.real() < 0.0 && pin != PinKind::Coefficient) u = -u;
      ResonancePoint pt;
      pt.omega = omega;
      pt.omega_hat = std::sqrt(tau) * omega;
      pt.tau = tau;
      pt.u = Field(mesh, u);
      pt.residual = resn / std::max(nu, 1e-14);
      pt.amplitude = nu * nu;
      pt.symmetry =
          mesh.symmetric() ? symmetry_class(pt.u, config.symmetry_tol) : Symmetry::None;
      pt.kind = ResonancePoint::Kind::Nonlinear;
      if (!(pt.omega.imag() < -1e-12))
        throw std::runtime_error("solve_nonlinear: spurious point with Im omega >= 0 rejected");
      return pt;
    }

    cache.fill_helmholtz_domega(omega, dK);
    Eigen::VectorXcd d1(n), d2(n);
    for (int i = 0; i < n; ++i) {
      d1[i] = 1.0 + 2.0 * std::norm(u[i]);
      d2[i] = u[i] * u[i];
    }
    const Eigen::MatrixXcd M1 = A * d1.asDiagonal();
    const Eigen::MatrixXcd M2 = A * d2.asDiagonal();
    J.setZero();
    J.block(0, 0, n, n) = -M1.real() - M2.real();
    J.block(0, 0, n, n).diagonal().array() += 1.0;
    J.block(0, n, n, n) = M1.imag() - M2.imag();
    J.block(n, 0, n, n) = -M1.imag() - M2.imag();
    J.block(n, n, n, n) = -M1.real() + M2.real();
    J.block(n, n, n, n).diagonal().array() += 1.0;
    const Eigen::VectorXcd q = -tau * (2.0 * omega * (K * Nu) + omega * omega * (dK * Nu));
    J.col(2 * n).head(n) = q.real();
    J.col(2 * n).segment(n, n) = q.imag();
    J.col(2 * n + 1).head(n) = -q.imag();
    J.col(2 * n + 1).segment(n, n) = q.real();
    for (int i = 0; i < n; ++i) J(2 * n, n + i) = mesh.weights[i] * gauge_field[i];
    if (pin == PinKind::Amplitude) {
      for (int i = 0; i < n; ++i) {
        J(2 * n + 1, i) = 2.0 * mesh.weights[i] * u[i].real();
        J(2 * n + 1, n + i) = 2.0 * mesh.weights[i] * u[i].imag();
      }
    } else {
      for (int i = 0; i < n; ++i) J(2 * n + 1, i) = mesh.weights[i] * pin_field[i];
    }
    rhs.head(n) = -F.real();
    rhs.segment(n, n) = -F.imag();
    rhs[2 * n] = -g1;
    rhs[2 * n + 1] = -g2;

    const Eigen::VectorXd dx = J.partialPivLu().solve(rhs);
    for (int i = 0; i < n; ++i) u[i] += Complex(dx[i], dx[n + i]);
    omega += Complex(dx[2 * n], dx[2 * n + 1]);
  }
  throw std::runtime_error("solve_nonlinear: no convergence, last residual " +
                           std::to_string(resn));
}

ResonancePoint solve_nonlinear_at_amplitude(const Mesh& mesh, double tau, double N_target,
                                            const ResonancePoint& seed,
                                            const Eigen::VectorXd& gauge_mode,
                                            const NonlinearConfig& config) {
  if (!(N_target > 0.0))
    throw std::invalid_argument("solve_nonlinear_at_amplitude: N_target must be positive");
  KernelCache cache(mesh);
  // rescale the seed state to the target amplitude
  const double n0 = std::sqrt(seed.amplitude);
  Eigen::VectorXcd u0 = seed.u.values * (std::sqrt(N_target) / std::max(n0, 1e-300));
  return solve_nonlinear(cache, tau, gauge_mode, PinKind::Amplitude, gauge_mode, N_target,
                         seed.omega, u0, config);
}

Branch continue_branch(const KernelCache& cache, double tau, const SpectralPair& mode,
                       double N_max, const NonlinearConfig& config) {
  const Mesh& mesh = cache.mesh();
  const int n = mesh.size();

  // linear seed for the mode
  Complex omega_seed;
  Eigen::VectorXcd u_seed = mode.phi.cast<Complex>();
  if (mesh.dim == 3) {
    omega_seed = asymptotic_linear_3d(mode, mesh, tau);
  } else {
    // near-constant mode -> principal (Lambert-W seed), otherwise bulk
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += mesh.weights[i] * mode.phi[i];
    mean /= mesh.total_measure;
    Eigen::VectorXd fluct = mode.phi.array() - mean;
    const double fl = weighted_norm(mesh, fluct.cast<Complex>());
    if (fl < 0.5)
      omega_seed = asymptotic_linear_2d_principal_refined(mesh.total_measure, tau);
    else
      omega_seed = asymptotic_linear_2d_bulk(mode.lambda, tau);
  }
  const ResonancePoint lin = solve_linear(cache, tau, omega_seed, u_seed);

  // phase-fix the linear state so <phi_mode, phi_*> is real positive
  Eigen::VectorXcd phistar = lin.u.values;
  const Complex c0 = weighted_inner(mesh, mode.phi, phistar);
  if (std::abs(c0) < 1e-12)
    throw std::runtime_error("continue_branch: linear state orthogonal to gauge mode");
  phistar *= std::conj(c0) / std::abs(c0);

  Branch branch;
  branch.parameter = "a";

  // symmetric finite differences over the first steps measure d omega/da at 0
  const double a_fd = config.max_step;
  NonlinearConfig cfg = config;
  const ResonancePoint plus = solve_nonlinear(cache, tau, mode.phi, PinKind::Coefficient,
                                              mode.phi, a_fd, lin.omega, a_fd * phistar, cfg);
  const ResonancePoint minus = solve_nonlinear(cache, tau, mode.phi, PinKind::Coefficient,
                                               mode.phi, -a_fd, lin.omega, -a_fd * phistar, cfg);
  branch.domega_da_abs = std::abs(plus.omega - minus.omega) / (2.0 * a_fd);
  branch.d2omega_da2_abs = std::abs(plus.omega + minus.omega - 2.0 * lin.omega) / (a_fd * a_fd);

  auto push_point = [&](double a, const ResonancePoint& pt) {
    BranchPoint bp;
    bp.a = a;
    bp.N = pt.amplitude;
    bp.omega = pt.omega;
    bp.u = pt.u.values;
    bp.residual = pt.residual;
    bp.symmetry = pt.symmetry;
    if (mesh.spec.shape == DomainSpec::Shape::Dimer) {
      double m1 = 0.0, m2 = 0.0;
      for (int i = 0; i < n; ++i)
        (mesh.particle_tag[i] == 1 ? m1 : m2) += mesh.weights[i] * std::norm(bp.u[i]);
      bp.loc_metric = (m1 - m2) / std::max(bp.N, 1e-300);
    }
    branch.points.push_back(std::move(bp));
  };
  push_point(a_fd, plus);

  // the branch emanates from the zero solution at the linear resonance
  double a_prev = 0.0;
  Eigen::VectorXcd u_prev2 = Eigen::VectorXcd::Zero(n);
  Complex om_prev2 = lin.omega;
  double step = config.max_step;
  const double step_min = config.max_step / 64.0;

  while (branch.points.back().N < N_max) {
    const BranchPoint& last = branch.points.back();
    bool ok = false;
    while (!ok) {
      const double a_next = last.a + step;
      // secant predictor in a
      const double ratio = (a_next - last.a) / std::max(last.a - a_prev, 1e-300);
      Eigen::VectorXcd u_pred = last.u + ratio * (last.u - u_prev2);
      Complex om_pred = last.omega + ratio * (last.omega - om_prev2);
      try {
        const ResonancePoint pt = solve_nonlinear(cache, tau, mode.phi, PinKind::Coefficient,
                                                  mode.phi, a_next, om_pred, u_pred, cfg);
        a_prev = last.a;
        u_prev2 = last.u;
        om_prev2 = last.omega;
        push_point(a_next, pt);
        ok = true;
      } catch (const std::exception&) {
        step *= 0.5;
        if (step < step_min) {
          branch.complete = false;
          return branch;
        }
      }
    }
  }
  return branch;
}

void write_branch_csv(std::ostream& os, const Branch& branch) {
  os << "index,a,N,re_omega,im_omega,residual,symmetry,loc_metric\n";
  os << std::setprecision(16) << std::scientific;
  for (size_t i = 0; i < branch.points.size(); ++i) {
    const BranchPoint& p = branch.points[i];
    os << i << ',' << p.a << ',' << p.N << ',' << p.omega.real() << ',' << p.omega.imag() << ','
       << p.residual << ',' << to_string(p.symmetry) << ',' << p.loc_metric << '\n';
  }
}

}  // namespace dires
