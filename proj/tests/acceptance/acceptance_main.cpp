// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: runs every top-level verification criterion at its stated
// tolerance and prints one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "dires/dimer.hpp"
#include "dires/threading.hpp"

using namespace dires;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

struct Criterion {
  int id;
  const char* label;
  Clock::time_point start = Clock::now();
  bool ok = true;
  std::string detail;

  Criterion(int id_, const char* label_) : id(id_), label(label_) {}

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start).count();
  }
  void report() {
    std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", id, label,
                elapsed(), detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

const double kLam0Ball = 4.0 / (kPi * kPi);
const double kLam1Ball = 1.0 / (kPi * kPi);

double weighted_norm(const Mesh& m, const Eigen::VectorXcd& v) {
  double s = 0.0;
  for (int i = 0; i < m.size(); ++i) s += m.weights[i] * std::norm(v[i]);
  return std::sqrt(s);
}

Complex weighted_inner(const Mesh& m, const Eigen::VectorXd& f, const Eigen::VectorXcd& g) {
  Complex s = 0.0;
  for (int i = 0; i < m.size(); ++i) s += m.weights[i] * f[i] * g[i];
  return s;
}

// ---------------------------------------------------------------------------
// 1. Unit-ball Newtonian spectrum against the radial matching oracle
//    (cos k = 0 and j0(k) = 0), Richardson trend over h in {0.1, 0.07, 0.05}.
// ---------------------------------------------------------------------------
std::vector<SpectralPair> criterion_1() {
  Criterion c(1, "unit-ball Newtonian spectrum vs radial-matching oracle");
  std::vector<double> errs;
  std::vector<SpectralPair> finest;
  for (double h : {0.1, 0.07, 0.05}) {
    const Mesh mesh = build_mesh(DomainSpec::ball(1.0, h));
    auto pairs = compute_spectrum(mesh, OperatorKind::Newtonian, 5);
    errs.push_back(std::abs(pairs[0].lambda - kLam0Ball) / kLam0Ball);
    if (h == 0.05) finest = std::move(pairs);
  }
  c.expect(errs.back() <= 0.01, fmt("lambda0 error %.3f%% > 1%% at h=0.05", 100 * errs.back()));
  c.expect(errs[1] < errs[0] && errs[2] < errs[1],
           fmt("no Richardson trend: %.2e, %.2e, %.2e", errs[0], errs[1], errs[2]));
  const auto clusters = cluster_eigenvalues(finest);
  c.expect(clusters[1] == clusters[2] && clusters[2] == clusters[3] && clusters[4] != clusters[1],
           "second eigenvalue cluster size != 3");
  for (int p = 1; p <= 3; ++p)
    c.expect(std::abs(finest[p].lambda - kLam1Ball) / kLam1Ball < 0.01,
             fmt("cluster value off 1/pi^2 by %.3f%%",
                 100 * std::abs(finest[p].lambda - kLam1Ball) / kLam1Ball));
  c.expect(c.elapsed() <= 600.0, fmt("runtime %.0f s > 600 s", c.elapsed()));
  c.report();
  return finest;
}

// ---------------------------------------------------------------------------
// 2. Krein-Rutman: lambda0 simple with relative gap > 0.5 and strictly
//    positive sign-fixed principal eigenfield.
// ---------------------------------------------------------------------------
void criterion_2(const std::vector<SpectralPair>& ball_pairs) {
  Criterion c(2, "Krein-Rutman simplicity and positivity");
  const auto rep = check_krein_rutman(ball_pairs);
  c.expect(rep.simple, "lambda0 not simple");
  c.expect(rep.relative_gap > 0.5, fmt("relative gap %.3f <= 0.5", rep.relative_gap));
  c.expect(rep.min_phi0 > 0.0, fmt("min phi0 = %.3e not positive", rep.min_phi0));
  c.report();
}

// ---------------------------------------------------------------------------
// 3. 3D linear resonance asymptotics on the unit ball across tau decades.
// ---------------------------------------------------------------------------
std::vector<ResonancePoint> criterion_3() {
  Criterion c(3, "3D linear resonance asymptotics (Re within 3%, Im ratio in [0.8,1.2])");
  const Mesh mesh = build_mesh(DomainSpec::ball(1.0, 0.15));
  KernelCache cache(mesh);
  const auto pairs = compute_spectrum(mesh, OperatorKind::Newtonian, 2);
  std::vector<ResonancePoint> points;
  for (double tau : {1e3, 1e4, 1e5}) {
    const Complex seed = asymptotic_linear_3d(pairs[0], mesh, tau);
    const auto pt = solve_linear(cache, tau, seed, pairs[0].phi.cast<Complex>());
    const double re_exact = 1.0 / std::sqrt(tau * kLam0Ball);
    const double re_err = std::abs(pt.omega.real() - re_exact) / pt.omega.real();
    // unit-ball identity 8 pi lambda0^2 = (int phi0)^2 makes the imaginary
    // leading term exactly -1/tau
    const double im_ratio = pt.omega.imag() / (-1.0 / tau);
    c.expect(re_err <= 0.03, fmt("tau=%g: Re error %.3f%%", tau, 100 * re_err));
    c.expect(im_ratio >= 0.8 && im_ratio <= 1.2, fmt("tau=%g: Im ratio %.3f", tau, im_ratio));
    points.push_back(pt);
  }
  c.report();
  return points;
}

// ---------------------------------------------------------------------------
// 4. Lower half-plane and conjugate symmetry.
// ---------------------------------------------------------------------------
void criterion_4(const std::vector<ResonancePoint>& linear_points) {
  Criterion c(4, "lower half-plane and conjugate symmetry");
  for (const auto& pt : linear_points)
    c.expect(pt.omega.imag() < 0.0, "linear resonance with Im omega >= 0");

  const Mesh mesh = build_mesh(DomainSpec::ball(1.0, 0.2));
  KernelCache cache(mesh);
  const auto pairs = compute_spectrum(mesh, OperatorKind::Newtonian, 1);
  const double tau = 1e4;
  const Complex seed = asymptotic_linear_3d(pairs[0], mesh, tau);
  const auto a = solve_linear(cache, tau, seed, pairs[0].phi.cast<Complex>());
  const auto b =
      solve_linear(cache, tau, -std::conj(seed), pairs[0].phi.cast<Complex>().conjugate());
  c.expect(std::abs(b.omega + std::conj(a.omega)) <= 1e-10 * std::abs(a.omega),
           fmt("conjugate frequency gap %.2e", std::abs(b.omega + std::conj(a.omega))));
  c.expect((b.u.values - a.u.values.conjugate()).cwiseAbs().maxCoeff() <= 1e-8,
           "conjugate state mismatch");

  // nonlinear points share the property
  NonlinearConfig cfg;
  const auto nl = solve_nonlinear_at_amplitude(mesh, tau, 1e-3, a, pairs[0].phi, cfg);
  c.expect(nl.omega.imag() < 0.0, "nonlinear resonance with Im omega >= 0");
  c.report();
}

// ---------------------------------------------------------------------------
// 5. 2D principal resonance: Lambert-W defining relation to 1e-12 and the
//    solved unit-disk resonance at tau = 1e6 within 20% of the leading value.
// ---------------------------------------------------------------------------
void criterion_5() {
  Criterion c(5, "2D principal resonance (Lambert-W relation, 20% leading match)");
  const double tau = 1e6;
  const double eps = 1.0 / std::sqrt(tau);
  for (double area : {kPi, 2.0}) {
    const double w0 = principal_2d_leading(eps, area);
    const double resid = std::abs(w0 * w0 * std::log(eps * w0) + 2.0 * kPi / area);
    c.expect(resid <= 1e-12, fmt("Lambert residual %.2e at |D|=%.3f", resid, area));
  }
  const Mesh mesh = build_mesh(DomainSpec::disk(1.0, 0.1));
  KernelCache cache(mesh);
  const double seed = asymptotic_linear_2d_principal_refined(mesh.total_measure, tau);
  const Eigen::VectorXcd u0 =
      Eigen::VectorXcd::Constant(mesh.size(), 1.0 / std::sqrt(mesh.total_measure));
  const auto pt = solve_linear(cache, tau, seed, u0);
  const double lead = std::sqrt(4.0 * kPi / (kPi * tau * std::log(tau)));
  const double gap = std::abs(pt.omega.real() - lead) / lead;
  c.expect(gap <= 0.20, fmt("solved vs leading gap %.1f%%", 100 * gap));
  c.expect(pt.omega.imag() < 0.0, "2D principal resonance not in lower half-plane");
  c.report();
}

// ---------------------------------------------------------------------------
// 6. Nonlinear branch quadratic law on the unit ball at tau = 1e4.
// ---------------------------------------------------------------------------
void criterion_6() {
  Criterion c(6, "nonlinear branch quadratic law (da-derivative absent, state linear in a)");
  const Mesh mesh = build_mesh(DomainSpec::ball(1.0, 0.2));
  KernelCache cache(mesh);
  const auto pairs = compute_spectrum(mesh, OperatorKind::Newtonian, 1);
  const double tau = 1e4;
  NonlinearConfig cfg;
  cfg.max_step = 0.01;
  const Branch branch = continue_branch(cache, tau, pairs[0], 1e-4, cfg);
  c.expect(branch.domega_da_abs <= 1e-2 * branch.d2omega_da2_abs,
           fmt("fd1 %.2e > 1e-2 * fd2 %.2e", branch.domega_da_abs, branch.d2omega_da2_abs));

  // ||u/a - phi_*|| <= C a with C pinned at 0.05
  const auto lin = solve_linear(cache, tau, asymptotic_linear_3d(pairs[0], mesh, tau),
                                pairs[0].phi.cast<Complex>());
  Eigen::VectorXcd phistar = lin.u.values;
  const Complex c0 = weighted_inner(mesh, pairs[0].phi, phistar);
  phistar *= std::conj(c0) / std::abs(c0);
  Complex omega = lin.omega;
  Eigen::VectorXcd useed = 1e-3 * phistar;
  for (double a : {1e-3, 5e-3, 1e-2, 2.5e-2, 5e-2, 7.5e-2, 1e-1}) {
    const auto pt = solve_nonlinear(cache, tau, pairs[0].phi, PinKind::Coefficient,
                                    pairs[0].phi, a, omega, useed, cfg);
    const double e = weighted_norm(mesh, pt.u.values / a - phistar);
    c.expect(e <= 0.05 * a, fmt("a=%.0e: ||u/a - phi_*|| = %.2e > 0.05 a", a, e));
    omega = pt.omega;
    useed = pt.u.values;
  }
  c.report();
}

// ---------------------------------------------------------------------------
// 7. Dilute dimer splitting: O(L^-2)-consistent error decay and the far-field
//    limit k_I * 8 pi L -> 128/pi^3.
// ---------------------------------------------------------------------------
std::vector<DiluteDimerReport> criterion_7() {
  Criterion c(7, "dilute dimer splitting and far-field interaction");
  const auto reports = dilute_dimer_analysis(DomainSpec::ball(1.0, 0.25), {3.0, 4.0, 6.0}, 0.25);
  auto err = [](const DiluteDimerReport& r) {
    return std::max(std::abs(r.lambda_plus_meas - r.lambda_plus_pred),
                    std::abs(r.lambda_minus_meas - r.lambda_minus_pred));
  };
  for (const auto& r : reports)
    c.expect(r.lambda_minus_meas < r.lambda_single && r.lambda_single < r.lambda_plus_meas,
             "lambda_- < lambda_0 < lambda_+ violated");
  const double r2x = err(reports[0]) / err(reports[2]);   // L: 3 -> 6
  const double r15x = err(reports[1]) / err(reports[2]);  // L: 4 -> 6
  c.expect(r2x >= 2.5 && r2x <= 6.0, fmt("2x-step error ratio %.2f outside [2.5, 6]", r2x));
  c.expect(r15x >= 2.5 && r15x <= 6.0, fmt("1.5x-step error ratio %.2f outside [2.5, 6]", r15x));
  const double far = reports[2].k_I * 8.0 * kPi * reports[2].L;
  const double target = 128.0 / (kPi * kPi * kPi);
  c.expect(std::abs(far - target) / target <= 0.10,
           fmt("k_I * 8 pi L = %.4f vs 128/pi^3 = %.4f", far, target));
  c.report();
  return reports;
}

// ---------------------------------------------------------------------------
// 8. Symmetry-breaking bifurcation of the dilute 3D dimer at tau = 1e4.
// ---------------------------------------------------------------------------
ModeCoefficients criterion_8() {
  Criterion c(8, "3D symmetry-breaking bifurcation vs reduced model");
  const double h = 0.25, L = 3.0, tau = 1e4;
  const Mesh mesh = build_mesh(DomainSpec::dimer(DomainSpec::ball(1.0, h), L, h));
  KernelCache cache(mesh);
  const auto pairs = compute_spectrum(mesh, OperatorKind::Newtonian, 3);
  const auto coeffs = mode_coefficients(mesh, pairs[0], pairs[1]);
  const auto assumptions = check_assumptions(coeffs, &pairs[1]);
  c.expect(assumptions.pass, "dilute coefficient assumptions fail");
  const auto pred = reduced_bifurcation_point(coeffs);

  NonlinearConfig cfg;
  cfg.max_step = 0.1 * pred.p_plus_star;
  Branch sym = continue_branch(cache, tau, pairs[0], 1.5 * pred.N_crit_estimate, cfg);
  c.expect(sym.complete, "symmetric branch aborted before the predicted threshold");
  detect_symmetry_breaking(sym, cache, tau, pairs[0], pairs[1], cfg);
  c.expect(sym.events.size() == 1, fmt("expected 1 event, found %g", double(sym.events.size())));
  if (!sym.events.empty()) {
    const auto& ev = sym.events.front();
    const double gap = std::abs(ev.p_plus_sq - pred.N_crit_estimate) / pred.N_crit_estimate;
    c.expect(gap <= 0.15, fmt("p_+^2 at crossing off reduced value by %.1f%%", 100 * gap));
    // sigma_odd positive well below the threshold
    c.expect(sym.points.front().sigma_restricted > 0.0, "sigma_odd not positive at small N");

    std::vector<double> tips;
    for (int dir : {+1, -1}) {
      const Branch asym = trace_asymmetric_branch(ev, dir, cache, tau, pairs[0], pairs[1], 10,
                                                  0.08 * pred.p_plus_star, cfg);
      c.expect(asym.points.size() >= 10, "asymmetric branch shorter than 10 steps");
      for (size_t i = 0; i + 1 < asym.points.size(); ++i)
        c.expect(std::abs(asym.points[i + 1].loc_metric) > std::abs(asym.points[i].loc_metric),
                 "localization not monotone along the asymmetric branch");
      tips.push_back(asym.points.back().loc_metric);
    }
    c.expect(tips[0] * tips[1] < 0.0, "asymmetric branches not mirror images in loc_metric");
    c.expect(std::abs(tips[0] + tips[1]) <= 0.05 * std::abs(tips[0]),
             fmt("mirror asymmetry %.2e", std::abs(tips[0] + tips[1])));
  }
  c.expect(c.elapsed() <= 1800.0, fmt("runtime %.0f s > 1800 s", c.elapsed()));
  c.report();
  return coeffs;
}

// ---------------------------------------------------------------------------
// 9. 2D no-bifurcation: sigma_odd floor along the principal branch of a
//    symmetric disk dimer at tau = 1e6, zero events emitted.
// ---------------------------------------------------------------------------
void criterion_9() {
  Criterion c(9, "2D no-bifurcation obstruction (sigma_odd floor, zero events)");
  const Mesh mesh = build_mesh(DomainSpec::dimer(DomainSpec::disk(1.0, 0.1), 3.0, 0.1));
  NonlinearConfig cfg;
  cfg.max_step = 0.25;
  const auto rep = two_d_obstruction(mesh, 1e6, 8.0, cfg);
  c.expect(rep.events_principal == 0,
           fmt("%g events on the principal branch", double(rep.events_principal)));
  c.expect(rep.sigma_min_ratio_principal >= 0.1,
           fmt("sigma_odd floor ratio %.3f < 0.1", rep.sigma_min_ratio_principal));
  c.expect(rep.N_reached_principal >= 8.0,
           fmt("Newton stopped at N = %.2f < N_bound", rep.N_reached_principal));
  c.expect(rep.events_antisym == 0, "events on the antisymmetric branch");
  c.expect(rep.min_re_phase_term >= 1.0, "phase term Re(2+e^{-2i dtheta}) below 1");
  c.expect(rep.matched_coefficient < 0.0, "matched log coefficient not negative");
  c.report();
}

// ---------------------------------------------------------------------------
// 10. Exact property suites.
// ---------------------------------------------------------------------------
void criterion_10(const ModeCoefficients& dimer_coeffs) {
  Criterion c(10, "exact property suites (S1, reflection, parity, phase classes)");
  const Mesh mesh = build_mesh(DomainSpec::dimer(DomainSpec::ball(1.0, 0.3), 2.0, 0.3));
  std::mt19937 rng(99u);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) v[i] = Complex(g(rng), g(rng));
  const Field u(mesh, v);

  // S1 equivariance of the Kerr map and of the residual, machine precision
  for (double theta : {0.3, 1.7, 4.4}) {
    const Complex phase = std::exp(Complex(0, theta));
    Field pu = u;
    pu.values *= phase;
    const double kerr_gap =
        (kerr_map(pu).values - phase * kerr_map(u).values).cwiseAbs().maxCoeff();
    c.expect(kerr_gap <= 1e-14 * kerr_map(u).values.cwiseAbs().maxCoeff(),
             fmt("kerr equivariance gap %.2e", kerr_gap));
    const Eigen::VectorXcd r1 = nl_residual(mesh, 1e4, Complex(0.015, -1e-4), pu).values;
    const Eigen::VectorXcd r2 =
        phase * nl_residual(mesh, 1e4, Complex(0.015, -1e-4), u).values;
    c.expect((r1 - r2).cwiseAbs().maxCoeff() <= 1e-13 * r2.cwiseAbs().maxCoeff(),
             "residual equivariance beyond machine precision");
  }

  // reflection involution is bit-exact; reflection is a weighted isometry
  const Field rru = reflect(reflect(u));
  c.expect((rru.values - u.values).cwiseAbs().maxCoeff() == 0.0, "involution not bit-exact");
  c.expect(std::abs(norm(reflect(u)) - norm(u)) <= 1e-14 * norm(u), "reflection not isometric");

  // parity selection rule from the production dimer coefficients
  c.expect(dimer_coeffs.odd_overlap_ppp_m <= 1e-12,
           fmt("a_{+++-} = %.2e", dimer_coeffs.odd_overlap_ppp_m));
  c.expect(dimer_coeffs.odd_overlap_p_mmm <= 1e-12,
           fmt("a_{+---} = %.2e", dimer_coeffs.odd_overlap_p_mmm));

  // phase classes: pi/2 family excluded, Delta theta resolved mod pi
  const auto pred = reduced_bifurcation_point(dimer_coeffs);
  c.expect(pred.case2_precluded, "pi/2 phase family not excluded");
  const auto sec = reduced_secular_solve(dimer_coeffs, 0.05);
  c.expect(sec.delta_theta == 0.0, "Delta theta representative not in {0} mod pi");
  c.report();
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const auto ball_pairs = criterion_1();
  criterion_2(ball_pairs);
  const auto linear_points = criterion_3();
  criterion_4(linear_points);
  criterion_5();
  criterion_6();
  criterion_7();
  const auto coeffs = criterion_8();
  criterion_9();
  criterion_10(coeffs);
  std::printf("%s: %d/10 criteria passed (%.1f s total)\n", g_failures == 0 ? "OK" : "FAILED",
              10 - g_failures, std::chrono::duration<double>(Clock::now() - t0).count());
  return g_failures == 0 ? 0 : 1;
}
