// SPDX-License-Identifier: Apache-2.0
#include "dires/mesh.hpp"

#include <cmath>
#include <iomanip>
#include <stdexcept>
#include <unordered_map>

namespace dires {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct LatticeKey {
  int i, j, k;
  bool operator==(const LatticeKey& o) const { return i == o.i && j == o.j && k == o.k; }
};

struct LatticeHash {
  size_t operator()(const LatticeKey& key) const {
    size_t h = std::hash<int>()(key.i);
    h = h * 1000003u ^ std::hash<int>()(key.j);
    h = h * 1000003u ^ std::hash<int>()(key.k);
    return h;
  }
};

}  // namespace

DomainSpec DomainSpec::ball(double r, double h) {
  DomainSpec s;
  s.dimension = 3;
  s.shape = Shape::Ball;
  s.radius = r;
  s.resolution = h;
  return s;
}

DomainSpec DomainSpec::disk(double r, double h) {
  DomainSpec s;
  s.dimension = 2;
  s.shape = Shape::Disk;
  s.radius = r;
  s.resolution = h;
  return s;
}

DomainSpec DomainSpec::box(int dim, std::array<double, 3> ext, double h) {
  DomainSpec s;
  s.dimension = dim;
  s.shape = Shape::Box;
  s.extents = ext;
  if (dim == 2) s.extents[2] = 1.0;
  s.resolution = h;
  return s;
}

DomainSpec DomainSpec::dimer(DomainSpec base_particle, double L, double h) {
  DomainSpec s;
  s.dimension = base_particle.dimension;
  s.shape = Shape::Dimer;
  s.half_separation = L;
  s.base = std::make_shared<DomainSpec>(std::move(base_particle));
  s.resolution = h;
  return s;
}

void DomainSpec::validate() const {
  if (dimension != 2 && dimension != 3)
    throw std::invalid_argument("DomainSpec: dimension must be 2 or 3");
  if (!(resolution > 0.0)) throw std::invalid_argument("DomainSpec: resolution h must be > 0");
  switch (shape) {
    case Shape::Ball:
      if (dimension != 3) throw std::invalid_argument("DomainSpec: ball requires dimension 3");
      if (!(radius > 0.0)) throw std::invalid_argument("DomainSpec: radius must be > 0");
      break;
    case Shape::Disk:
      if (dimension != 2) throw std::invalid_argument("DomainSpec: disk requires dimension 2");
      if (!(radius > 0.0)) throw std::invalid_argument("DomainSpec: radius must be > 0");
      break;
    case Shape::Box:
      for (int d = 0; d < dimension; ++d)
        if (!(extents[d] > 0.0)) throw std::invalid_argument("DomainSpec: extents must be > 0");
      break;
    case Shape::Dimer: {
      if (!base) throw std::invalid_argument("DomainSpec: dimer requires a base particle");
      if (base->shape == Shape::Dimer)
        throw std::invalid_argument("DomainSpec: nested dimers are not supported");
      if (base->dimension != dimension)
        throw std::invalid_argument("DomainSpec: dimer base dimension mismatch");
      if (!(half_separation > 0.0))
        throw std::invalid_argument("DomainSpec: half separation L must be > 0");
      base->validate();
      if (half_separation <= base->half_width_x())
        throw std::invalid_argument("DomainSpec: overlapping particles (L <= base half-width)");
      break;
    }
  }
}

bool DomainSpec::reflection_symmetric() const {
  // All supported shapes are centered at the origin, so both the single
  // particles and the dimer construction are symmetric about {x1 = 0}.
  return true;
}

double DomainSpec::analytic_measure() const {
  switch (shape) {
    case Shape::Ball:
      return 4.0 / 3.0 * kPi * radius * radius * radius;
    case Shape::Disk:
      return kPi * radius * radius;
    case Shape::Box: {
      double m = 1.0;
      for (int d = 0; d < dimension; ++d) m *= extents[d];
      return m;
    }
    case Shape::Dimer:
      return 2.0 * base->analytic_measure();
  }
  return 0.0;
}

double DomainSpec::half_width_x() const {
  switch (shape) {
    case Shape::Ball:
    case Shape::Disk:
      return radius;
    case Shape::Box:
      return 0.5 * extents[0];
    case Shape::Dimer:
      return half_separation + base->half_width_x();
  }
  return 0.0;
}

bool DomainSpec::contains(const std::array<double, 3>& p) const {
  switch (shape) {
    case Shape::Ball: {
      const double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
      return r2 < radius * radius;
    }
    case Shape::Disk: {
      const double r2 = p[0] * p[0] + p[1] * p[1];
      return r2 < radius * radius;
    }
    case Shape::Box: {
      for (int d = 0; d < dimension; ++d)
        if (!(std::abs(p[d]) < 0.5 * extents[d])) return false;
      return true;
    }
    case Shape::Dimer: {
      // (x - (-L))^2 and its mirror image evaluate bitwise identically, which
      // keeps the cell set exactly reflection-symmetric.
      const std::array<double, 3> p1{p[0] + half_separation, p[1], p[2]};
      const std::array<double, 3> p2{p[0] - half_separation, p[1], p[2]};
      return base->contains(p1) || base->contains(p2);
    }
  }
  return false;
}

Mesh build_mesh(const DomainSpec& spec) {
  spec.validate();
  Mesh mesh;
  mesh.dim = spec.dimension;
  mesh.h = spec.resolution;
  mesh.spec = spec;

  const double h = spec.resolution;
  const double hw_x = spec.half_width_x();
  double hw_y = 0.0, hw_z = 0.0;
  const DomainSpec& particle = spec.shape == DomainSpec::Shape::Dimer ? *spec.base : spec;
  switch (particle.shape) {
    case DomainSpec::Shape::Ball:
    case DomainSpec::Shape::Disk:
      hw_y = hw_z = particle.radius;
      break;
    case DomainSpec::Shape::Box:
      hw_y = 0.5 * particle.extents[1];
      hw_z = 0.5 * particle.extents[2];
      break;
    default:
      break;
  }

  const int ni = static_cast<int>(std::ceil(hw_x / h)) + 1;
  const int nj = static_cast<int>(std::ceil(hw_y / h)) + 1;
  const int nk = spec.dimension == 3 ? static_cast<int>(std::ceil(hw_z / h)) + 1 : 0;
  const double w = spec.dimension == 3 ? h * h * h : h * h;

  for (int i = -ni; i < ni; ++i) {
    for (int j = -nj; j < nj; ++j) {
      if (spec.dimension == 3) {
        for (int k = -nk; k < nk; ++k) {
          const std::array<double, 3> c{(i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h};
          if (!spec.contains(c)) continue;
          mesh.centers.push_back(c);
          mesh.lattice.push_back({i, j, k});
          mesh.weights.push_back(w);
        }
      } else {
        const std::array<double, 3> c{(i + 0.5) * h, (j + 0.5) * h, 0.0};
        if (!spec.contains(c)) continue;
        mesh.centers.push_back(c);
        mesh.lattice.push_back({i, j, 0});
        mesh.weights.push_back(w);
      }
    }
  }

  if (mesh.centers.empty()) throw std::runtime_error("build_mesh: empty mesh");

  mesh.total_measure = w * mesh.size();
  mesh.particle_tag.resize(mesh.size(), 1);
  if (spec.shape == DomainSpec::Shape::Dimer) {
    for (int c = 0; c < mesh.size(); ++c)
      mesh.particle_tag[c] = mesh.centers[c][0] < 0.0 ? 1 : 2;
  }

  if (spec.reflection_symmetric()) {
    std::unordered_map<LatticeKey, int, LatticeHash> lookup;
    lookup.reserve(mesh.size());
    for (int c = 0; c < mesh.size(); ++c) {
      const auto& g = mesh.lattice[c];
      lookup.emplace(LatticeKey{g[0], g[1], g[2]}, c);
    }
    mesh.reflection_map.resize(mesh.size());
    for (int c = 0; c < mesh.size(); ++c) {
      const auto& g = mesh.lattice[c];
      const auto it = lookup.find(LatticeKey{-g[0] - 1, g[1], g[2]});
      if (it == lookup.end())
        throw std::runtime_error("build_mesh: reflection image missing, domain not symmetric");
      mesh.reflection_map[c] = it->second;
    }
  }
  return mesh;
}

void Mesh::dump_csv(std::ostream& os) const {
  os << (dim == 3 ? "index,x,y,z,weight,tag,mirror_index\n" : "index,x,y,weight,tag,mirror_index\n");
  os << std::setprecision(17) << std::scientific;
  for (int c = 0; c < size(); ++c) {
    os << c << ',' << centers[c][0] << ',' << centers[c][1];
    if (dim == 3) os << ',' << centers[c][2];
    os << ',' << weights[c] << ',' << particle_tag[c] << ','
       << (symmetric() ? reflection_map[c] : -1) << '\n';
  }
}

Complex inner(const Field& f, const Field& g) {
  if (f.mesh != g.mesh) throw std::invalid_argument("inner: fields on different meshes");
  Complex s = 0.0;
  for (int i = 0; i < f.mesh->size(); ++i)
    s += f.mesh->weights[i] * std::conj(f.values[i]) * g.values[i];
  return s;
}

double norm(const Field& f) { return std::sqrt(std::real(inner(f, f))); }

Field reflect(const Field& f) {
  const Mesh& m = *f.mesh;
  if (!m.symmetric()) throw std::runtime_error("reflect: domain not symmetric");
  Eigen::VectorXcd out(m.size());
  for (int i = 0; i < m.size(); ++i) out[i] = f.values[m.reflection_map[i]];
  return Field(m, std::move(out));
}

Eigen::VectorXd reflect(const Mesh& mesh, const Eigen::VectorXd& v) {
  if (!mesh.symmetric()) throw std::runtime_error("reflect: domain not symmetric");
  Eigen::VectorXd out(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) out[i] = v[mesh.reflection_map[i]];
  return out;
}

Eigen::VectorXcd reflect(const Mesh& mesh, const Eigen::VectorXcd& v) {
  if (!mesh.symmetric()) throw std::runtime_error("reflect: domain not symmetric");
  Eigen::VectorXcd out(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) out[i] = v[mesh.reflection_map[i]];
  return out;
}

Symmetry symmetry_class(const Field& f, double tol) {
  const double n = norm(f);
  if (!(n > 0.0)) throw std::invalid_argument("symmetry_class: zero field");
  const Field rf = reflect(f);
  double de = 0.0, dodd = 0.0;
  for (int i = 0; i < f.mesh->size(); ++i) {
    de += f.mesh->weights[i] * std::norm(rf.values[i] - f.values[i]);
    dodd += f.mesh->weights[i] * std::norm(rf.values[i] + f.values[i]);
  }
  de = std::sqrt(de);
  dodd = std::sqrt(dodd);
  if (de <= tol * n) return Symmetry::Even;  // even wins ties
  if (dodd <= tol * n) return Symmetry::Odd;
  return Symmetry::None;
}

Symmetry symmetry_class(const Mesh& mesh, const Eigen::VectorXd& v, double tol) {
  Field f(mesh, v.cast<Complex>());
  return symmetry_class(f, tol);
}

std::string to_string(Symmetry s) {
  switch (s) {
    case Symmetry::Even: return "even";
    case Symmetry::Odd: return "odd";
    default: return "none";
  }
}

std::vector<int> translation_map(const Mesh& single, const Mesh& dimer, double L) {
  const double ratio = L / dimer.h;
  const int shift = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - shift) > 1e-9 || std::abs(single.h - dimer.h) > 1e-15)
    throw std::invalid_argument("translation_map: L must be an integer multiple of h");
  std::unordered_map<LatticeKey, int, LatticeHash> lookup;
  lookup.reserve(single.size());
  for (int c = 0; c < single.size(); ++c) {
    const auto& g = single.lattice[c];
    lookup.emplace(LatticeKey{g[0], g[1], g[2]}, c);
  }
  std::vector<int> map(dimer.size(), -1);
  for (int c = 0; c < dimer.size(); ++c) {
    if (dimer.particle_tag[c] != 1) continue;
    const auto& g = dimer.lattice[c];
    const auto it = lookup.find(LatticeKey{g[0] + shift, g[1], g[2]});
    if (it == lookup.end())
      throw std::runtime_error("translation_map: dimer cell has no single-particle preimage");
    map[c] = it->second;
  }
  return map;
}

}  // namespace dires
