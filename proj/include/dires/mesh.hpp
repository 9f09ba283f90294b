// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace dires {

using Complex = std::complex<double>;

// Geometric description of the resonator domain D.  Dimers hold their base
// particle (centered at the origin) and the half separation L; the particles
// end up at (-L, 0[, 0]) and (+L, 0[, 0]).
struct DomainSpec {
  enum class Shape { Ball, Disk, Box, Dimer };

  int dimension = 3;
  Shape shape = Shape::Ball;
  double radius = 1.0;
  std::array<double, 3> extents{1.0, 1.0, 1.0};
  double half_separation = 0.0;
  std::shared_ptr<DomainSpec> base;
  double resolution = 0.1;  // cell size h

  static DomainSpec ball(double r, double h);
  static DomainSpec disk(double r, double h);
  static DomainSpec box(int dim, std::array<double, 3> ext, double h);
  static DomainSpec dimer(DomainSpec base_particle, double L, double h);

  void validate() const;
  bool reflection_symmetric() const;  // with respect to {x1 = 0}
  double analytic_measure() const;
  // half-width of the domain along x1 (used for dimer disjointness)
  double half_width_x() const;
  bool contains(const std::array<double, 3>& p) const;
};

// Voxel quadrature mesh.  Cell centers sit on the half-integer lattice
// ((i+1/2)h, (j+1/2)h[, (k+1/2)h]) in canonical lexicographic order; a cell is
// kept iff its center lies inside the analytic domain, with weight h^dim.
// Mirrored cells therefore carry equal weights and the reflection map is an
// exact involution.
struct Mesh {
  int dim = 3;
  double h = 0.0;
  std::vector<std::array<double, 3>> centers;   // z = 0 for 2D meshes
  std::vector<std::array<int, 3>> lattice;      // integer grid index of each cell
  std::vector<double> weights;
  std::vector<int> particle_tag;                // 1 or 2 (dimer), else 1
  std::vector<int> reflection_map;              // empty when not symmetric
  double total_measure = 0.0;
  DomainSpec spec;

  int size() const { return static_cast<int>(centers.size()); }
  bool symmetric() const { return !reflection_map.empty(); }
  double distance(int i, int j) const {
    const auto& a = centers[i];
    const auto& b = centers[j];
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  void dump_csv(std::ostream& os) const;
};

Mesh build_mesh(const DomainSpec& spec);

// Complex-valued state sampled at cell centers, with the weighted-L2 pairing
// <f, g> = sum_i w_i conj(f_i) g_i.
struct Field {
  const Mesh* mesh = nullptr;
  Eigen::VectorXcd values;

  Field() = default;
  Field(const Mesh& m, Eigen::VectorXcd v) : mesh(&m), values(std::move(v)) {}
  static Field zero(const Mesh& m) { return Field(m, Eigen::VectorXcd::Zero(m.size())); }
  static Field constant(const Mesh& m, Complex c) {
    return Field(m, Eigen::VectorXcd::Constant(m.size(), c));
  }
};

Complex inner(const Field& f, const Field& g);
double norm(const Field& f);

Field reflect(const Field& f);
Eigen::VectorXd reflect(const Mesh& mesh, const Eigen::VectorXd& v);
Eigen::VectorXcd reflect(const Mesh& mesh, const Eigen::VectorXcd& v);

enum class Symmetry { Even, Odd, None };

Symmetry symmetry_class(const Field& f, double tol);
Symmetry symmetry_class(const Mesh& mesh, const Eigen::VectorXd& v, double tol);

std::string to_string(Symmetry s);

// Index map carrying single-particle cell values onto the matching dimer cells
// of particle 1 (centered at -L): result[j] is the single-particle cell index
// for dimer cell j, or -1 off particle 1.  Requires L to be an integer
// multiple of h so the lattices align exactly.
std::vector<int> translation_map(const Mesh& single, const Mesh& dimer, double L);

}  // namespace dires
