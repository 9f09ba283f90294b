// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <ostream>

#include "dires/kernels.hpp"
#include "dires/mesh.hpp"

namespace dires {

enum class OperatorKind { HelmholtzPotential, Newtonian, TildeNewtonian };

// Dense collocation matrix of a volume potential on a mesh: entries(i,j)
// approximates the integral of the kernel over cell j evaluated at center i,
// i.e. entries(i,j) = G(omega, |x_i - x_j|) w_j off the diagonal and the
// equivalent-ball/disk self integral on it.  apply() is then just a
// matrix-vector product.
struct OperatorMatrix {
  Eigen::MatrixXcd entries;
  const Mesh* mesh = nullptr;
  Complex omega = 0.0;
  OperatorKind kind = OperatorKind::Newtonian;
};

// Static self integral over the ball/disk of measure w centered at the cell:
// 3D: rho^2/2 with rho = (3w/4pi)^{1/3};  2D: rho^2/4 - rho^2 ln(rho)/2 with
// rho = sqrt(w/pi).
double self_integral_static(int dim, double w);
// Finite limit of (G^omega - G^0)(r) as r -> 0: i omega/(4 pi) in 3D,
// -eta_omega in 2D.
Complex self_correction(int dim, Complex omega);

OperatorMatrix assemble_newtonian(const Mesh& mesh);
OperatorMatrix assemble_helmholtz(const Mesh& mesh, Complex omega);
// entrywise d/domega of assemble_helmholtz
OperatorMatrix assemble_helmholtz_domega(const Mesh& mesh, Complex omega);
// 2D mean-zero compression (I - P0) K (I - P0), P0 f = (sum w f / |D|) 1.
OperatorMatrix assemble_tilde(const Mesh& mesh);

Field apply(const OperatorMatrix& op, const Field& f);
Eigen::VectorXcd apply(const OperatorMatrix& op, const Eigen::VectorXcd& v);

// Binary dump: row-major (Re, Im) double pairs, little-endian.
void dump_matrix(std::ostream& os, const OperatorMatrix& op);

// Exact pairwise lattice offsets let the Helmholtz matrix and its
// omega-derivative be refilled per Newton step from one kernel evaluation per
// distinct cell-to-cell distance.
class KernelCache {
 public:
  explicit KernelCache(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }
  void fill_helmholtz(Complex omega, Eigen::MatrixXcd& K) const;
  void fill_helmholtz_domega(Complex omega, Eigen::MatrixXcd& dK) const;

 private:
  // table[s] = kernel value at distance h sqrt(s), for every realized squared
  // lattice offset s
  void build_table(Complex omega, bool derivative, std::vector<Complex>& table) const;
  void fill_from_table(const std::vector<Complex>& table, Complex diag_shift, bool derivative,
                       Eigen::MatrixXcd& M) const;

  const Mesh* mesh_;
  Eigen::MatrixXi sq_offset_;       // |g_i - g_j|^2
  std::vector<char> realized_;      // which squared offsets occur
  double self_static_ = 0.0;
};

// Symmetrized spectral matrix S = W^{1/2} G W^{1/2} (real kernel values); for
// the tilde kind the mean-zero projector is applied on both sides.
Eigen::MatrixXd symmetrized_matrix(const OperatorMatrix& op);

}  // namespace dires
