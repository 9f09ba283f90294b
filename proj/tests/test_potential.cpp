// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dires/potential.hpp"

using namespace dires;
using doctest::Approx;

namespace {

Field random_real_field(const Mesh& mesh, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) v[i] = g(rng);
  return Field(mesh, v);
}

}  // namespace

TEST_CASE("small-box newtonian entries match the kernel directly") {
  const double h = 0.5;
  const Mesh m = build_mesh(DomainSpec::box(3, {2 * h, 2 * h, 2 * h}, h));
  REQUIRE(m.size() == 8);
  const OperatorMatrix K = assemble_newtonian(m);
  const double w = h * h * h;
  for (int i = 0; i < m.size(); ++i) {
    for (int j = 0; j < m.size(); ++j) {
      if (i == j) {
        CHECK(K.entries(i, i).real() == Approx(self_integral_static(3, w)).epsilon(1e-14));
      } else {
        const double r = m.distance(i, j);
        CHECK(K.entries(i, j).real() == Approx(w / (4.0 * kPi * r)).epsilon(1e-14));
      }
      CHECK(K.entries(i, j).imag() == 0.0);
    }
  }
}

TEST_CASE("K_D[1] at the ball center tends to 1/2") {
  for (double h : {0.2, 0.1}) {
    const Mesh m = build_mesh(DomainSpec::ball(1.0, h));
    const OperatorMatrix K = assemble_newtonian(m);
    const Field one = Field::constant(m, 1.0);
    const Field K1 = apply(K, one);
    // nearest cell to the origin
    int best = 0;
    double bd = 1e300;
    for (int i = 0; i < m.size(); ++i) {
      const auto& c = m.centers[i];
      const double d2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
      if (d2 < bd) {
        bd = d2;
        best = i;
      }
    }
    CHECK(K1.values[best].real() == Approx(0.5).epsilon(4.0 * h));
    CHECK(std::abs(K1.values[best].imag()) == 0.0);
  }
}

TEST_CASE("helmholtz reduces to newtonian at omega = 0") {
  const Mesh m = build_mesh(DomainSpec::ball(1.0, 0.35));
  const OperatorMatrix K0 = assemble_newtonian(m);
  const OperatorMatrix Kw = assemble_helmholtz(m, 0.0);
  CHECK((Kw.entries - K0.entries).cwiseAbs().maxCoeff() == 0.0);
  const Mesh d2 = build_mesh(DomainSpec::disk(1.0, 0.2));
  const OperatorMatrix D0 = assemble_newtonian(d2);
  const OperatorMatrix Dw = assemble_helmholtz(d2, 0.0);
  CHECK((Dw.entries - D0.entries).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("small-omega corrections match the leading kernel terms") {
  const Mesh m = build_mesh(DomainSpec::ball(1.0, 0.3));
  const OperatorMatrix K0 = assemble_newtonian(m);
  const double w = m.weights[0];
  const double omega = 1e-3;
  const OperatorMatrix Kw = assemble_helmholtz(m, omega);
  // (K^w - K^0)/w_j ~ i omega/(4 pi) uniformly (the K_{D,1} term)
  const Complex lead = Complex(0, 1) * omega / (4.0 * kPi);
  double worst = 0.0;
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j)
      worst = std::max(worst, std::abs((Kw.entries(i, j) - K0.entries(i, j)) / w - lead));
  CHECK(worst < omega * omega);  // next order is omega^2 r/(8 pi), r <= 2

  const Mesh d = build_mesh(DomainSpec::disk(1.0, 0.2));
  const OperatorMatrix D0 = assemble_newtonian(d);
  const double omega2 = 1e-4;
  const OperatorMatrix Dw = assemble_helmholtz(d, omega2);
  const Complex lead2 = -eta_omega(omega2);
  worst = 0.0;
  for (int i = 0; i < d.size(); ++i)
    for (int j = 0; j < d.size(); ++j)
      worst = std::max(worst,
                       std::abs((Dw.entries(i, j) - D0.entries(i, j)) / d.weights[0] - lead2));
  CHECK(worst < 100.0 * omega2 * omega2 * std::abs(std::log(omega2)));
}

TEST_CASE("remainder scaling in 3D is O(eps)") {
  const Mesh m = build_mesh(DomainSpec::ball(1.0, 0.35));
  const OperatorMatrix K0 = assemble_newtonian(m);
  const double omega_hat = 1.5;
  std::vector<double> norms;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const OperatorMatrix Kw = assemble_helmholtz(m, eps * omega_hat);
    norms.push_back((Kw.entries - K0.entries).cwiseAbs().maxCoeff());
  }
  CHECK(norms[0] / norms[1] == Approx(10.0).epsilon(0.15));
  CHECK(norms[1] / norms[2] == Approx(10.0).epsilon(0.15));
}

TEST_CASE("tilde operator annihilates constants and is mean-zero") {
  const Mesh m = build_mesh(DomainSpec::disk(1.0, 0.15));
  const OperatorMatrix Kt = assemble_tilde(m);
  const Field one = Field::constant(m, 1.0);
  CHECK(norm(apply(Kt, one)) < 1e-12);
  const Field f = random_real_field(m, 3u);
  const Field g = apply(Kt, f);
  CHECK(std::abs(inner(one, g)) < 1e-12 * norm(f));
  // eigenvalues on the mean-zero subspace are real: symmetrized matrix check
  const Eigen::MatrixXd S = symmetrized_matrix(Kt);
  CHECK((S - S.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("apply is linear and commutes with reflection") {
  const Mesh m = build_mesh(DomainSpec::dimer(DomainSpec::ball(1.0, 0.25), 2.0, 0.25));
  const OperatorMatrix K = assemble_newtonian(m);
  CHECK(norm(apply(K, Field::zero(m))) == 0.0);
  const Field f = random_real_field(m, 11u);
  const Complex alpha(0.7, -0.3);
  Field af = f;
  af.values *= alpha;
  const Field lhs = apply(K, af);
  Field rhs = apply(K, f);
  rhs.values *= alpha;
  CHECK((lhs.values - rhs.values).cwiseAbs().maxCoeff() < 1e-14);

  const Field c1 = reflect(apply(K, f));
  const Field c2 = apply(K, reflect(f));
  double scale = 0.0;
  for (int i = 0; i < m.size(); ++i) scale = std::max(scale, std::abs(c1.values[i]));
  CHECK((c1.values - c2.values).cwiseAbs().maxCoeff() < 1e-13 * scale);
}

TEST_CASE("newtonian is self-adjoint and strongly positive in 3D") {
  const Mesh m = build_mesh(DomainSpec::ball(1.0, 0.3));
  const OperatorMatrix K = assemble_newtonian(m);
  const Field f = random_real_field(m, 5u);
  const Field g = random_real_field(m, 6u);
  const Complex a = inner(f, apply(K, g));
  const Complex b = inner(apply(K, f), g);
  CHECK(std::abs(a - b) < 1e-12 * std::abs(a));

  Field pos = Field::zero(m);
  pos.values[3] = 1.0;  // nonnegative, not identically zero
  const Field Kp = apply(K, pos);
  for (int i = 0; i < m.size(); ++i) CHECK(Kp.values[i].real() > 0.0);
}

TEST_CASE("kernel cache matches direct assembly") {
  const Mesh m = build_mesh(DomainSpec::disk(1.0, 0.25));
  KernelCache cache(m);
  const Complex omega(3e-4, -2e-5);
  Eigen::MatrixXcd K;
  cache.fill_helmholtz(omega, K);
  KernelParams params{2, omega};
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) {
      if (i == j) continue;
      const Complex expect = green(params, m.distance(i, j)) * m.weights[j];
      CHECK(std::abs(K(i, j) - expect) < 1e-15 + 1e-13 * std::abs(expect));
    }
  // derivative against finite differences
  Eigen::MatrixXcd dK, Kp, Km;
  cache.fill_helmholtz_domega(omega, dK);
  const double dw = 1e-8;
  cache.fill_helmholtz(omega + dw, Kp);
  cache.fill_helmholtz(omega - dw, Km);
  const double err = (dK - (Kp - Km) / (2.0 * dw)).cwiseAbs().maxCoeff();
  CHECK(err < 1e-5 * dK.cwiseAbs().maxCoeff());
}
