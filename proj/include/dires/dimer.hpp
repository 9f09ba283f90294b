// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "dires/nonlinear.hpp"

namespace dires {

// Quartic mode overlaps of the two leading dimer modes.  In 3D these are the
// plain weighted integrals of phi_+^a phi_-^b; the 2D variant weights them
// through the static potential with phi_+ = 1 and carries the eta-dependent
// corrections separately.
struct ModeCoefficients {
  int dim = 3;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double A_pp = 0.0;  // a_{++++}
  double A_pm = 0.0;  // two-plus overlaps
  double A_mm = 0.0;  // a_{----}
  double A_mp = 0.0;  // 2D only
  double odd_overlap_ppp_m = 0.0;  // |int phi_+^3 phi_-|
  double odd_overlap_p_mmm = 0.0;  // |int phi_+ phi_-^3|
};

ModeCoefficients mode_coefficients(const Mesh& mesh, const SpectralPair& plus,
                                   const SpectralPair& minus);
ModeCoefficients mode_coefficients_2d(const Mesh& mesh, const SpectralPair& minus);
// eta-corrected 2D pieces A_{++}^{eps w} = <1_D, K_D[1]> - eta |D| and
// A_{+-}^{eps w} = <1_D, K_D[phi_-^2]> - eta.
std::pair<Complex, Complex> eta_corrected_coefficients_2d(const Mesh& mesh,
                                                          const ModeCoefficients& coeffs,
                                                          Complex eps_omega_hat);

struct AssumptionReport {
  bool lambda_minus_simple = false;
  bool lambda_minus_odd = false;
  bool hybridization_sign = false;    // lambda_+ A_pp - 3 lambda_- A_pm < 0
  bool antisymmetric_guard = false;   // lambda_+ A_pp - lambda_- A_pm > 0
  double smallness_ratio = 0.0;       // (lambda_+ - lambda_-)/(3 lambda_- A_pm - lambda_+ A_pp)
  bool pass = false;
};

AssumptionReport check_assumptions(const ModeCoefficients& coeffs,
                                   const SpectralPair* minus = nullptr,
                                   double gap_tol_rel = 1e-6);

struct BifurcationPrediction {
  double p_plus_star = 0.0;
  double omega_hat_star = 0.0;
  double N_crit_estimate = 0.0;  // ~ p_plus_star^2
  AssumptionReport assumptions;
  bool case2_precluded = false;  // pi/2 phase family has no small positive root
};

BifurcationPrediction reduced_bifurcation_point(const ModeCoefficients& coeffs);

struct SecularPoint {
  double omega_hat_sq = 0.0;
  double p_plus_sq = 0.0;
  double delta_theta = 0.0;  // identified mod pi; representative in {0}
};

// Leading-order asymmetric-branch algebra at prescribed p_-.
SecularPoint reduced_secular_solve(const ModeCoefficients& coeffs, double p_minus);

// Smallest singular value and determinant sign of the parity-restricted
// real Jacobian v -> v - tau omega^2 K^omega[(1+2|u|^2) v + u^2 conj(v)].
struct RestrictedJacobian {
  double sigma_min = 0.0;
  double det_sign = 0.0;
  Eigen::VectorXcd null_field;  // filled when with_null_vector is set
};

RestrictedJacobian restricted_jacobian(const KernelCache& cache, double tau, Complex omega,
                                       const Eigen::VectorXcd& u, Symmetry parity,
                                       bool with_null_vector = false);

struct DetectionOptions {
  Symmetry parity = Symmetry::Odd;  // subspace the Jacobian is restricted to
  double bisect_rel_width = 1e-3;   // relative width of the N bracket
  int max_bisect = 60;
};

// Scans the branch for sign changes of the restricted Jacobian, localizes each
// by bisection in the branch parameter, and appends the events.  Fills
// sigma_restricted on every branch point.
void detect_symmetry_breaking(Branch& branch, const KernelCache& cache, double tau,
                              const SpectralPair& plus, const SpectralPair& minus,
                              const NonlinearConfig& config, const DetectionOptions& opts = {});

// Branch-switch at a detected event by perturbing along the odd null vector,
// then continuation pinned on p_- = Re<phi_-, u> with the given sign.
Branch trace_asymmetric_branch(const BifurcationEvent& event, int direction,
                               const KernelCache& cache, double tau, const SpectralPair& plus,
                               const SpectralPair& minus, int steps, double p_minus_step,
                               const NonlinearConfig& config);

struct TwoDObstructionReport {
  int events_principal = 0;
  int events_antisym = 0;
  double sigma_start_principal = 0.0;
  double sigma_min_ratio_principal = 0.0;  // min sigma / sigma at N -> 0
  double sigma_min_ratio_antisym = 0.0;
  double N_reached_principal = 0.0;
  double N_reached_antisym = 0.0;
  double min_re_phase_term = 0.0;  // min over dtheta of Re(2 + e^{-2i dtheta}), >= 1
  double matched_coefficient = 0.0;  // -|D| < 0
  bool ktilde_top_simple = false;
  bool ktilde_top_odd = false;
  Branch principal_branch;
  Branch antisym_branch;
};

// Runs the no-bifurcation check on a 2D symmetric dimer: principal symmetric
// branch (odd-restricted Jacobian) and antisymmetric branch (even-restricted),
// plus the symbolic log-matching sign obstruction.
TwoDObstructionReport two_d_obstruction(const Mesh& mesh2d, double tau, double N_bound,
                                        const NonlinearConfig& config);

// Bifurcation diagram rows for every branch point, then one row per detected
// event with branch_id = -1.
void write_diagram_csv(std::ostream& os, const std::vector<Branch>& branches,
                       const std::vector<BifurcationEvent>& events);
void write_prediction_json(std::ostream& os, const ModeCoefficients& coeffs,
                           const BifurcationPrediction& pred);

}  // namespace dires
