// SPDX-License-Identifier: Apache-2.0
#include "dires/potential.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dires {

double self_integral_static(int dim, double w) {
  if (dim == 3) {
    const double rho = std::cbrt(3.0 * w / (4.0 * kPi));
    return 0.5 * rho * rho;
  }
  const double rho = std::sqrt(w / kPi);
  return 0.25 * rho * rho - 0.5 * rho * rho * std::log(rho);
}

Complex self_correction(int dim, Complex omega) {
  if (dim == 3) return Complex(0, 1) * omega / (4.0 * kPi);
  return -eta_omega(omega);
}

OperatorMatrix assemble_newtonian(const Mesh& mesh) {
  if (mesh.size() == 0) throw std::invalid_argument("assemble_newtonian: empty mesh");
  OperatorMatrix op;
  op.mesh = &mesh;
  op.omega = 0.0;
  op.kind = OperatorKind::Newtonian;
  KernelCache cache(mesh);
  cache.fill_helmholtz(0.0, op.entries);
  return op;
}

OperatorMatrix assemble_helmholtz(const Mesh& mesh, Complex omega) {
  if (mesh.dim == 2 && omega == 0.0) {
    // the 2D static limit of the Hankel kernel is exactly the log kernel
    OperatorMatrix op = assemble_newtonian(mesh);
    op.kind = OperatorKind::HelmholtzPotential;
    return op;
  }
  OperatorMatrix op;
  op.mesh = &mesh;
  op.omega = omega;
  op.kind = omega == 0.0 ? OperatorKind::Newtonian : OperatorKind::HelmholtzPotential;
  KernelCache cache(mesh);
  cache.fill_helmholtz(omega, op.entries);
  return op;
}

OperatorMatrix assemble_helmholtz_domega(const Mesh& mesh, Complex omega) {
  OperatorMatrix op;
  op.mesh = &mesh;
  op.omega = omega;
  op.kind = OperatorKind::HelmholtzPotential;
  KernelCache cache(mesh);
  cache.fill_helmholtz_domega(omega, op.entries);
  return op;
}

OperatorMatrix assemble_tilde(const Mesh& mesh) {
  if (mesh.dim != 2) throw std::invalid_argument("assemble_tilde: 2D meshes only");
  OperatorMatrix op = assemble_newtonian(mesh);
  op.kind = OperatorKind::TildeNewtonian;
  const int n = mesh.size();
  const double measure = mesh.total_measure;
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = mesh.weights[i];
  // Q = I - (1/|D|) 1 w^T acting on cell values; entries <- Q entries Q
  Eigen::RowVectorXcd colsum = (w.cast<Complex>().transpose() * op.entries) / measure;
  op.entries -= Eigen::VectorXcd::Ones(n) * colsum;
  Eigen::VectorXcd rowsum = (op.entries * w.cast<Complex>()) / measure;
  op.entries -= rowsum * Eigen::RowVectorXcd::Ones(n);
  return op;
}

Field apply(const OperatorMatrix& op, const Field& f) {
  if (f.mesh != op.mesh) throw std::invalid_argument("apply: mesh mismatch");
  return Field(*op.mesh, op.entries * f.values);
}

Eigen::VectorXcd apply(const OperatorMatrix& op, const Eigen::VectorXcd& v) {
  if (v.size() != op.entries.cols()) throw std::invalid_argument("apply: dimension mismatch");
  return op.entries * v;
}

void dump_matrix(std::ostream& os, const OperatorMatrix& op) {
  const auto n = op.entries.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < op.entries.cols(); ++j) {
      const double re = op.entries(i, j).real();
      const double im = op.entries(i, j).imag();
      os.write(reinterpret_cast<const char*>(&re), sizeof(double));
      os.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
  }
}

KernelCache::KernelCache(const Mesh& mesh) : mesh_(&mesh) {
  const int n = mesh.size();
  sq_offset_.resize(n, n);
  int max_s = 0;
  for (int i = 0; i < n; ++i) {
    const auto& gi = mesh.lattice[i];
    for (int j = 0; j < n; ++j) {
      const auto& gj = mesh.lattice[j];
      const int di = gi[0] - gj[0], dj = gi[1] - gj[1], dk = gi[2] - gj[2];
      const int s = di * di + dj * dj + dk * dk;
      sq_offset_(i, j) = s;
      if (s > max_s) max_s = s;
    }
  }
  realized_.assign(max_s + 1, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) realized_[sq_offset_(i, j)] = 1;
  self_static_ = self_integral_static(mesh.dim, mesh.weights[0]);
}

void KernelCache::build_table(Complex omega, bool derivative, std::vector<Complex>& table) const {
  table.assign(realized_.size(), Complex(0.0));
  KernelParams params{mesh_->dim, omega};
  for (size_t s = 1; s < realized_.size(); ++s) {
    if (!realized_[s]) continue;
    const double r = mesh_->h * std::sqrt(double(s));
    table[s] = derivative ? green_domega(params, r) : green(params, r);
  }
}

void KernelCache::fill_from_table(const std::vector<Complex>& table, Complex diag,
                                  bool derivative, Eigen::MatrixXcd& M) const {
  const int n = mesh_->size();
  M.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const double wj = mesh_->weights[j];
    for (int i = 0; i < n; ++i) M(i, j) = table[sq_offset_(i, j)] * wj;
    M(j, j) = derivative ? diag * wj : self_static_ + diag * wj;
  }
}

void KernelCache::fill_helmholtz(Complex omega, Eigen::MatrixXcd& K) const {
  std::vector<Complex> table;
  build_table(omega, false, table);
  const Complex diag = omega == 0.0 ? Complex(0.0) : self_correction(mesh_->dim, omega);
  fill_from_table(table, diag, false, K);
}

void KernelCache::fill_helmholtz_domega(Complex omega, Eigen::MatrixXcd& dK) const {
  std::vector<Complex> table;
  build_table(omega, true, table);
  // derivative of the diagonal correction term
  const Complex diag = mesh_->dim == 3 ? Complex(0, 1) / (4.0 * kPi) : -eta_omega_domega(omega);
  fill_from_table(table, diag, true, dK);
}

Eigen::MatrixXd symmetrized_matrix(const OperatorMatrix& op) {
  const Mesh& mesh = *op.mesh;
  const int n = mesh.size();
  Eigen::VectorXd sqw(n);
  for (int i = 0; i < n; ++i) sqw[i] = std::sqrt(mesh.weights[i]);
  Eigen::MatrixXd S(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      S(i, j) = op.entries(i, j).real() / mesh.weights[j] * sqw[i] * sqw[j];
  if (op.kind == OperatorKind::TildeNewtonian) {
    // entries already carry the projector; symmetrize against roundoff
    S = 0.5 * (S + S.transpose()).eval();
    return S;
  }
  S = 0.5 * (S + S.transpose()).eval();
  return S;
}

}  // namespace dires
