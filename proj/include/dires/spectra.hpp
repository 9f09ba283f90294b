// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <ostream>
#include <vector>

#include "dires/mesh.hpp"
#include "dires/potential.hpp"

namespace dires {

struct SpectralPair {
  double lambda = 0.0;
  Eigen::VectorXd phi;           // weighted-orthonormal, sign-fixed
  double multiplicity_gap = 0.0; // distance to the nearest distinct eigenvalue cluster
  Symmetry symmetry = Symmetry::None;
  double residual = 0.0;         // ||K phi - lambda phi|| in the weighted norm
};

// k largest eigenpairs of the weighted operator represented by op (newtonian
// or tilde kinds).  Eigen-solve happens on the symmetrized matrix
// W^{1/2} G W^{1/2}; eigenvectors map back through W^{-1/2}.  Sign convention:
// weighted mean >= 0, exact-zero-mean ties broken by the first significant
// entry positive.
std::vector<SpectralPair> top_eigenpairs(const OperatorMatrix& op, int k);

// Same contract, dispatching on mesh size: dense decomposition up to
// dense_threshold cells, deflated Lanczos on the matrix-free kernel operator
// beyond it (3D newtonian only; every other kind stays desk-sized).
std::vector<SpectralPair> compute_spectrum(const Mesh& mesh, OperatorKind kind, int k,
                                           int dense_threshold = 2048);

struct KreinRutmanReport {
  bool pass = false;
  bool simple = false;
  double relative_gap = 0.0;
  double min_phi0 = 0.0;
  int offending_cell = -1;
};

// lambda_0 simple (gap above gap_tol_rel * lambda_0) and sign-fixed phi_0
// strictly positive at every cell.
KreinRutmanReport check_krein_rutman(const std::vector<SpectralPair>& pairs,
                                     double gap_tol_rel = 1e-6);

struct DiluteDimerReport {
  double L = 0.0;
  double lambda_single = 0.0;
  double k_I = 0.0;
  double lambda_plus_pred = 0.0, lambda_minus_pred = 0.0;
  double lambda_plus_meas = 0.0, lambda_minus_meas = 0.0;
  double overlap_plus = 0.0, overlap_minus = 0.0;  // vs (T_L phi0 +- R T_L phi0)/sqrt(2)
};

// First-order dilute perturbation check: predictions lambda_0 +- k_I with
// k_I = <R T_L phi0, K_D[T_L phi0]> against the measured dimer spectrum.
std::vector<DiluteDimerReport> dilute_dimer_analysis(const DomainSpec& base,
                                                     const std::vector<double>& L_values,
                                                     double h);

void write_spectrum_csv(std::ostream& os, const std::vector<SpectralPair>& pairs);

// Groups near-degenerate eigenvalues at relative tolerance cluster_tol and
// returns the cluster id of each pair.
std::vector<int> cluster_eigenvalues(const std::vector<SpectralPair>& pairs,
                                     double cluster_tol = 1e-3);

}  // namespace dires
