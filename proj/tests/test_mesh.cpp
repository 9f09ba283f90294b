// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dires/kernels.hpp"
#include "dires/mesh.hpp"

using namespace dires;
using doctest::Approx;

namespace {

Field random_field(const Mesh& mesh, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) v[i] = Complex(g(rng), g(rng));
  return Field(mesh, v);
}

Field coordinate_field(const Mesh& mesh, int axis) {
  Eigen::VectorXcd v(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) v[i] = mesh.centers[i][axis];
  return Field(mesh, v);
}

}  // namespace

TEST_CASE("measure converges at first order") {
  const double vol = 4.0 / 3.0 * kPi;
  double prev_err = -1.0;
  std::vector<double> errs;
  for (double h : {0.2, 0.1, 0.05}) {
    const Mesh m = build_mesh(DomainSpec::ball(1.0, h));
    errs.push_back(std::abs(m.total_measure - vol) / vol);
  }
  CHECK(errs[1] < errs[0] / 2.0);
  CHECK(errs[2] < errs[1] / 2.0);
  (void)prev_err;

  const Mesh d = build_mesh(DomainSpec::disk(1.0, 0.02));
  CHECK(d.total_measure == Approx(kPi).epsilon(5e-3));
  const Mesh b = build_mesh(DomainSpec::box(3, {1.0, 0.5, 0.25}, 0.125));
  CHECK(b.total_measure == Approx(0.125).epsilon(1e-12));  // box aligns with the lattice
}

TEST_CASE("cells lie inside the domain and weights are uniform") {
  const Mesh m = build_mesh(DomainSpec::ball(1.0, 0.21));
  for (int i = 0; i < m.size(); ++i) {
    const auto& c = m.centers[i];
    CHECK(c[0] * c[0] + c[1] * c[1] + c[2] * c[2] < 1.0);
    CHECK(m.weights[i] == m.weights[0]);
  }
}

TEST_CASE("empty and invalid specs") {
  CHECK_THROWS_WITH_AS(build_mesh(DomainSpec::ball(0.1, 1.0)), doctest::Contains("empty mesh"),
                       std::runtime_error);
  CHECK_THROWS(build_mesh(DomainSpec::ball(-1.0, 0.1)));
  CHECK_THROWS(build_mesh(DomainSpec::ball(1.0, 0.0)));
  CHECK_THROWS(build_mesh(DomainSpec::dimer(DomainSpec::ball(1.0, 0.2), 0.5, 0.2)));
}

TEST_CASE("dimer tags and reflection map") {
  const Mesh m = build_mesh(DomainSpec::dimer(DomainSpec::ball(1.0, 0.25), 2.0, 0.25));
  int n1 = 0, n2 = 0;
  for (int t : m.particle_tag) (t == 1 ? n1 : n2)++;
  CHECK(n1 == n2);
  REQUIRE(m.symmetric());
  for (int i = 0; i < m.size(); ++i) {
    CHECK(m.reflection_map[m.reflection_map[i]] == i);
    CHECK(m.particle_tag[m.reflection_map[i]] == 3 - m.particle_tag[i]);
    CHECK(m.weights[m.reflection_map[i]] == m.weights[i]);
  }
}

TEST_CASE("reflect acts by mirror values") {
  const Mesh m = build_mesh(DomainSpec::dimer(DomainSpec::ball(1.0, 0.25), 2.0, 0.25));
  const Field one = Field::constant(m, 1.0);
  const Field r1 = reflect(one);
  for (int i = 0; i < m.size(); ++i) CHECK(r1.values[i] == one.values[i]);

  const Field x1 = coordinate_field(m, 0);
  const Field rx1 = reflect(x1);
  for (int i = 0; i < m.size(); ++i) CHECK(rx1.values[i] == -x1.values[i]);

  const Field f = random_field(m, 7u);
  const Field rrf = reflect(reflect(f));
  for (int i = 0; i < m.size(); ++i) CHECK(rrf.values[i] == f.values[i]);  // bit-exact

  // isometry in the weighted norm
  CHECK(norm(reflect(f)) == Approx(norm(f)).epsilon(1e-15));

  const Mesh plain = build_mesh(DomainSpec::ball(1.0, 0.3));
  CHECK(plain.symmetric());  // centered shapes are symmetric too
}

TEST_CASE("symmetry classification") {
  const Mesh m = build_mesh(DomainSpec::ball(1.0, 0.3));
  CHECK(symmetry_class(Field::constant(m, 1.0), 1e-12) == Symmetry::Even);
  CHECK(symmetry_class(coordinate_field(m, 0), 1e-12) == Symmetry::Odd);
  Field mixed = coordinate_field(m, 0);
  mixed.values.array() += 1.0;
  CHECK(symmetry_class(mixed, 1e-12) == Symmetry::None);
  CHECK_THROWS(symmetry_class(Field::zero(m), 1e-12));
}

TEST_CASE("translation map aligns the single particle with the dimer") {
  const double h = 0.25, L = 3.0;
  const Mesh single = build_mesh(DomainSpec::ball(1.0, h));
  const Mesh dm = build_mesh(DomainSpec::dimer(DomainSpec::ball(1.0, h), L, h));
  CHECK(dm.size() == 2 * single.size());
  const auto map = translation_map(single, dm, L);
  int mapped = 0;
  for (int c = 0; c < dm.size(); ++c) {
    if (map[c] < 0) {
      CHECK(dm.particle_tag[c] == 2);
      continue;
    }
    ++mapped;
    CHECK(dm.centers[c][0] == Approx(single.centers[map[c]][0] - L).epsilon(1e-15));
    CHECK(dm.centers[c][1] == single.centers[map[c]][1]);
  }
  CHECK(mapped == single.size());
  CHECK_THROWS(translation_map(single, dm, L + 0.1));  // off-lattice shift
}

TEST_CASE("mesh csv dump") {
  const Mesh m = build_mesh(DomainSpec::disk(1.0, 0.5));
  std::ostringstream os;
  m.dump_csv(os);
  CHECK(os.str().find("index,x,y,weight,tag,mirror_index") == 0);
}
