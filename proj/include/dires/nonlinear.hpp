// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dires/resonance.hpp"

namespace dires {

struct NonlinearConfig {
  double eta = 1.0;        // Kerr strength, fixed to 1
  double newton_tol = 1e-11;
  int max_iter = 40;
  double max_step = 0.05;  // continuation step in the mode coefficient a
  double symmetry_tol = 1e-6;
};

// Kerr map N(u) = u + |u|^2 u, applied pointwise at cell centers.
Field kerr_map(const Field& u);
Eigen::VectorXcd kerr_map(const Eigen::VectorXcd& u);

// u - tau omega^2 K^omega[N(u)]
Field nl_residual(const Mesh& mesh, double tau, Complex omega, const Field& u);

enum class PinKind {
  Amplitude,    // ||u||^2 = value
  Coefficient,  // Re <pin_field, u> = value (signed)
};

// Gauge-fixed Newton solve of the nonlinear resonance system: 2n residual
// equations, Im <gauge, u> = 0, and one pin equation, for the unknowns
// (Re u, Im u, Re omega, Im omega).
ResonancePoint solve_nonlinear(const KernelCache& cache, double tau,
                               const Eigen::VectorXd& gauge_field, PinKind pin,
                               const Eigen::VectorXd& pin_field, double pin_value,
                               Complex omega0, const Eigen::VectorXcd& u0,
                               const NonlinearConfig& config);

// Spec'd entry point: prescribed amplitude ||u||^2 = N_target, gauge pinned to
// the given mode.
ResonancePoint solve_nonlinear_at_amplitude(const Mesh& mesh, double tau, double N_target,
                                            const ResonancePoint& seed,
                                            const Eigen::VectorXd& gauge_mode,
                                            const NonlinearConfig& config);

struct BifurcationEvent {
  double N_crit = 0.0;        // amplitude at the located crossing
  double a_crit = 0.0;        // gauge-mode coefficient there
  double p_plus_sq = 0.0;     // |<phi_+, u>|^2 at the crossing
  Complex omega = 0.0;
  Complex omega_hat = 0.0;
  double sigma_at_crossing = 0.0;
  Eigen::VectorXcd null_field;     // restricted-Jacobian null direction (full mesh)
  Eigen::VectorXcd u_at_crossing;  // converged state at the located crossing
  int bracket_index = -1;          // branch point index ending the sign bracket
};

struct BranchPoint {
  double a = 0.0;        // Re <gauge, u>
  double N = 0.0;
  Complex omega = 0.0;
  Eigen::VectorXcd u;
  double residual = 0.0;
  Symmetry symmetry = Symmetry::None;
  double sigma_restricted = 0.0;  // filled by bifurcation detection
  double loc_metric = 0.0;        // (|u|^2 mass on particle 1 - particle 2)/N
  int branch_id = 0;
};

struct Branch {
  std::vector<BranchPoint> points;
  std::string parameter = "a";
  std::vector<BifurcationEvent> events;
  bool complete = true;  // false if continuation aborted early
  // symmetric finite-difference derivative estimates at a = 0
  double domega_da_abs = 0.0;
  double d2omega_da2_abs = 0.0;
};

// Continues the nonlinear branch of the given linear mode from a ~ 0 up to
// amplitude N_max, stepping in a with a secant predictor and Newton corrector.
// Failed steps halve the step down to max_step/64 before aborting with the
// partial branch.
Branch continue_branch(const KernelCache& cache, double tau, const SpectralPair& mode,
                       double N_max, const NonlinearConfig& config);

void write_branch_csv(std::ostream& os, const Branch& branch);

}  // namespace dires
