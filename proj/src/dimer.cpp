// SPDX-License-Identifier: Apache-2.0
#include "dires/dimer.hpp"

#include <cmath>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace dires {

namespace {

double weighted_norm(const Mesh& mesh, const Eigen::VectorXcd& v) {
  double s = 0.0;
  for (int i = 0; i < mesh.size(); ++i) s += mesh.weights[i] * std::norm(v[i]);
  return std::sqrt(s);
}

Complex weighted_inner(const Mesh& mesh, const Eigen::VectorXd& f, const Eigen::VectorXcd& g) {
  Complex s = 0.0;
  for (int i = 0; i < mesh.size(); ++i) s += mesh.weights[i] * f[i] * g[i];
  return s;
}

double quartic_overlap(const Mesh& mesh, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& c, const Eigen::VectorXd& d) {
  double s = 0.0;
  for (int i = 0; i < mesh.size(); ++i) s += mesh.weights[i] * a[i] * b[i] * c[i] * d[i];
  return s;
}

// representative cells of the reflection pairs (i < mirror(i); the lattice has
// no fixed points on {x1 = 0})
std::vector<int> pair_representatives(const Mesh& mesh) {
  std::vector<int> reps;
  reps.reserve(mesh.size() / 2);
  for (int i = 0; i < mesh.size(); ++i)
    if (i < mesh.reflection_map[i]) reps.push_back(i);
  return reps;
}

}  // namespace

ModeCoefficients mode_coefficients(const Mesh& mesh, const SpectralPair& plus,
                                   const SpectralPair& minus) {
  if (plus.symmetry != Symmetry::Even || minus.symmetry != Symmetry::Odd)
    throw std::invalid_argument(
        "mode_coefficients: symmetry check failure (need even phi_+, odd phi_-)");
  ModeCoefficients c;
  c.dim = mesh.dim;
  c.lambda_plus = plus.lambda;
  c.lambda_minus = minus.lambda;
  c.A_pp = quartic_overlap(mesh, plus.phi, plus.phi, plus.phi, plus.phi);
  c.A_pm = quartic_overlap(mesh, plus.phi, plus.phi, minus.phi, minus.phi);
  c.A_mm = quartic_overlap(mesh, minus.phi, minus.phi, minus.phi, minus.phi);
  c.odd_overlap_ppp_m =
      std::abs(quartic_overlap(mesh, plus.phi, plus.phi, plus.phi, minus.phi));
  c.odd_overlap_p_mmm =
      std::abs(quartic_overlap(mesh, plus.phi, minus.phi, minus.phi, minus.phi));
  return c;
}

ModeCoefficients mode_coefficients_2d(const Mesh& mesh, const SpectralPair& minus) {
  if (mesh.dim != 2) throw std::invalid_argument("mode_coefficients_2d: 2D meshes only");
  if (minus.symmetry != Symmetry::Odd)
    throw std::invalid_argument("mode_coefficients_2d: symmetry check failure (phi_- not odd)");
  ModeCoefficients c;
  c.dim = 2;
  c.lambda_minus = minus.lambda;
  const OperatorMatrix K = assemble_newtonian(mesh);
  const int n = mesh.size();
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd mm(n);
  for (int i = 0; i < n; ++i) mm[i] = minus.phi[i] * minus.phi[i];
  const auto bracket = [&](const Eigen::VectorXd& left, const Eigen::VectorXd& f) {
    const Eigen::VectorXcd Kf = K.entries * f.cast<Complex>();
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += mesh.weights[i] * left[i] * Kf[i].real();
    return s;
  };
  const double measure = mesh.total_measure;
  c.A_pp = bracket(ones, ones) / measure;            // <1_D, K[1]>
  c.A_pm = bracket(ones, mm) / measure;              // <1_D, K[phi_-^2]>
  c.A_mp = bracket(minus.phi, minus.phi);            // <phi_-, K[phi_-]>
  Eigen::VectorXd mmm(n);
  for (int i = 0; i < n; ++i) mmm[i] = mm[i] * minus.phi[i];
  c.A_mm = bracket(minus.phi, mmm);                  // <phi_-, K[phi_-^3]>
  // parity selection: one or three minus indices vanish
  c.odd_overlap_ppp_m = std::abs(bracket(ones, minus.phi) / measure);
  c.odd_overlap_p_mmm = std::abs(bracket(minus.phi, mm));
  return c;
}

std::pair<Complex, Complex> eta_corrected_coefficients_2d(const Mesh& mesh,
                                                          const ModeCoefficients& coeffs,
                                                          Complex eps_omega_hat) {
  const Complex eta = eta_omega(eps_omega_hat);
  return {coeffs.A_pp - eta * mesh.total_measure, coeffs.A_pm - eta};
}

AssumptionReport check_assumptions(const ModeCoefficients& coeffs, const SpectralPair* minus,
                                   double gap_tol_rel) {
  AssumptionReport rep;
  if (minus) {
    rep.lambda_minus_simple =
        minus->multiplicity_gap > gap_tol_rel * std::abs(minus->lambda);
    rep.lambda_minus_odd = minus->symmetry == Symmetry::Odd;
  } else {
    rep.lambda_minus_simple = rep.lambda_minus_odd = true;
  }
  const double lp = coeffs.lambda_plus, lm = coeffs.lambda_minus;
  rep.hybridization_sign = lp * coeffs.A_pp - 3.0 * lm * coeffs.A_pm < 0.0;
  rep.antisymmetric_guard = lp * coeffs.A_pp - lm * coeffs.A_pm > 0.0;
  const double denom = 3.0 * lm * coeffs.A_pm - lp * coeffs.A_pp;
  rep.smallness_ratio = denom != 0.0 ? (lp - lm) / denom : std::numeric_limits<double>::infinity();
  rep.pass = rep.lambda_minus_simple && rep.lambda_minus_odd && rep.hybridization_sign &&
             rep.antisymmetric_guard;
  return rep;
}

BifurcationPrediction reduced_bifurcation_point(const ModeCoefficients& coeffs) {
  BifurcationPrediction pred;
  pred.assumptions = check_assumptions(coeffs);
  const double lp = coeffs.lambda_plus, lm = coeffs.lambda_minus;
  const double denom = 3.0 * lm * coeffs.A_pm - lp * coeffs.A_pp;
  if (!(denom > 0.0))
    throw std::runtime_error("reduced_bifurcation_point: no symmetry-breaking predicted");
  const double p2 = (lp - lm) / denom;
  pred.p_plus_star = std::sqrt(std::max(p2, 0.0));
  pred.N_crit_estimate = p2;
  pred.omega_hat_star = std::sqrt(1.0 / (lp * (1.0 + p2 * coeffs.A_pp)));
  // pi/2 family: lambda_+ - lambda_- + (lambda_+ A_pp - lambda_- A_pm) p^2 = 0
  // has no positive root when both terms are positive
  pred.case2_precluded = lp > lm && lp * coeffs.A_pp - lm * coeffs.A_pm > 0.0;
  return pred;
}

SecularPoint reduced_secular_solve(const ModeCoefficients& coeffs, double p_minus) {
  const double lp = coeffs.lambda_plus, lm = coeffs.lambda_minus;
  const double denom = lp * coeffs.A_pp - 3.0 * lm * coeffs.A_pm;  // < 0 under the assumption
  const double p2star = (lm - lp) / denom;
  const double slope = (lm * coeffs.A_mm - 3.0 * lp * coeffs.A_pm) / denom;
  SecularPoint pt;
  pt.p_plus_sq = p2star + slope * p_minus * p_minus;
  if (pt.p_plus_sq <= 0.0)
    throw std::runtime_error("reduced_secular_solve: branch terminated (p_+^2 <= 0)");
  pt.omega_hat_sq =
      1.0 / (lp * (1.0 + pt.p_plus_sq * coeffs.A_pp + 3.0 * p_minus * p_minus * coeffs.A_pm));
  pt.delta_theta = 0.0;
  return pt;
}

RestrictedJacobian restricted_jacobian(const KernelCache& cache, double tau, Complex omega,
                                       const Eigen::VectorXcd& u, Symmetry parity,
                                       bool with_null_vector) {
  const Mesh& mesh = cache.mesh();
  if (!mesh.symmetric()) throw std::runtime_error("restricted_jacobian: domain not symmetric");
  if (parity == Symmetry::None)
    throw std::invalid_argument("restricted_jacobian: parity must be even or odd");
  const double sgn = parity == Symmetry::Odd ? -1.0 : 1.0;
  const std::vector<int> reps = pair_representatives(mesh);
  const int m = static_cast<int>(reps.size());
  const int n = mesh.size();

  Eigen::MatrixXcd K;
  cache.fill_helmholtz(omega, K);
  const Complex s = tau * omega * omega;

  Eigen::VectorXcd d1(n), d2(n);
  for (int i = 0; i < n; ++i) {
    d1[i] = s * (1.0 + 2.0 * std::norm(u[i]));
    d2[i] = s * u[i] * u[i];
  }

  // C = B^T_w (tau w^2 K diag(d)) B for the sparse pair basis
  Eigen::MatrixXcd C(m, m), D(m, m);
  Eigen::VectorXcd col(n);
  for (int k = 0; k < m; ++k) {
    const int i = reps[k];
    const int j = mesh.reflection_map[i];
    const double c = 1.0 / std::sqrt(2.0 * mesh.weights[i]);
    col = c * (d1[i] * K.col(i) + sgn * d1[j] * K.col(j));
    for (int r = 0; r < m; ++r) {
      const int ir = reps[r];
      const int jr = mesh.reflection_map[ir];
      const double cr = 1.0 / std::sqrt(2.0 * mesh.weights[ir]);
      C(r, k) = cr * (mesh.weights[ir] * col[ir] + sgn * mesh.weights[jr] * col[jr]);
    }
    col = c * (d2[i] * K.col(i) + sgn * d2[j] * K.col(j));
    for (int r = 0; r < m; ++r) {
      const int ir = reps[r];
      const int jr = mesh.reflection_map[ir];
      const double cr = 1.0 / std::sqrt(2.0 * mesh.weights[ir]);
      D(r, k) = cr * (mesh.weights[ir] * col[ir] + sgn * mesh.weights[jr] * col[jr]);
    }
  }

  Eigen::MatrixXd J(2 * m, 2 * m);
  J.block(0, 0, m, m) = -C.real() - D.real();
  J.block(0, 0, m, m).diagonal().array() += 1.0;
  J.block(0, m, m, m) = C.imag() - D.imag();
  J.block(m, 0, m, m) = -C.imag() - D.imag();
  J.block(m, m, m, m) = -C.real() + D.real();
  J.block(m, m, m, m).diagonal().array() += 1.0;

  RestrictedJacobian out;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
  double sign = lu.permutationP().determinant() > 0 ? 1.0 : -1.0;
  for (int i = 0; i < 2 * m; ++i) {
    const double d = lu.matrixLU()(i, i);
    if (d < 0.0) sign = -sign;
    if (d == 0.0) sign = 0.0;
  }
  out.det_sign = sign;

  if (with_null_vector) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinV);
    out.sigma_min = svd.singularValues()(2 * m - 1);
    const Eigen::VectorXd xi = svd.matrixV().col(2 * m - 1);
    out.null_field = Eigen::VectorXcd::Zero(n);
    for (int k = 0; k < m; ++k) {
      const int i = reps[k];
      const int j = mesh.reflection_map[i];
      const double c = 1.0 / std::sqrt(2.0 * mesh.weights[i]);
      const Complex z(xi[k], xi[m + k]);
      out.null_field[i] = c * z;
      out.null_field[j] = sgn * c * z;
    }
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(J);
    out.sigma_min = svd.singularValues()(2 * m - 1);
  }
  return out;
}

void detect_symmetry_breaking(Branch& branch, const KernelCache& cache, double tau,
                              const SpectralPair& plus, const SpectralPair& minus,
                              const NonlinearConfig& config, const DetectionOptions& opts) {
  const Mesh& mesh = cache.mesh();
  if (branch.points.empty()) return;
  (void)minus;

  std::vector<double> signs(branch.points.size());
  for (size_t j = 0; j < branch.points.size(); ++j) {
    const auto rj =
        restricted_jacobian(cache, tau, branch.points[j].omega, branch.points[j].u, opts.parity);
    branch.points[j].sigma_restricted = rj.sigma_min;
    signs[j] = rj.det_sign;
  }

  for (size_t j = 1; j < branch.points.size(); ++j) {
    if (!(signs[j - 1] * signs[j] < 0.0)) continue;
    // localize the crossing by bisection in the branch parameter
    BranchPoint lo = branch.points[j - 1];
    BranchPoint hi = branch.points[j];
    const double lo_sign = signs[j - 1];
    ResonancePoint mid_pt;
    double mid_sigma = 0.0;
    for (int it = 0; it < opts.max_bisect; ++it) {
      if (hi.N - lo.N <= opts.bisect_rel_width * 0.5 * (hi.N + lo.N)) break;
      const double a_mid = 0.5 * (lo.a + hi.a);
      const Eigen::VectorXcd u_seed = 0.5 * (lo.u + hi.u);
      const Complex om_seed = 0.5 * (lo.omega + hi.omega);
      mid_pt = solve_nonlinear(cache, tau, plus.phi, PinKind::Coefficient, plus.phi, a_mid,
                               om_seed, u_seed, config);
      const auto rj = restricted_jacobian(cache, tau, mid_pt.omega, mid_pt.u.values, opts.parity);
      mid_sigma = rj.sigma_min;
      BranchPoint mid;
      mid.a = a_mid;
      mid.N = mid_pt.amplitude;
      mid.omega = mid_pt.omega;
      mid.u = mid_pt.u.values;
      if (rj.det_sign == lo_sign)
        lo = mid;
      else
        hi = mid;
    }
    BifurcationEvent ev;
    ev.a_crit = 0.5 * (lo.a + hi.a);
    ev.N_crit = 0.5 * (lo.N + hi.N);
    ev.omega = 0.5 * (lo.omega + hi.omega);
    ev.omega_hat = std::sqrt(tau) * ev.omega;
    ev.sigma_at_crossing = mid_sigma;
    ev.bracket_index = static_cast<int>(j);
    // state and null direction at the located crossing
    const ResonancePoint at = solve_nonlinear(cache, tau, plus.phi, PinKind::Coefficient,
                                              plus.phi, ev.a_crit, ev.omega,
                                              0.5 * (lo.u + hi.u), config);
    const Complex cp = weighted_inner(mesh, plus.phi, at.u.values);
    ev.p_plus_sq = std::norm(cp);
    ev.u_at_crossing = at.u.values;
    ev.omega = at.omega;
    ev.omega_hat = std::sqrt(tau) * at.omega;
    ev.N_crit = at.amplitude;
    const auto rj = restricted_jacobian(cache, tau, at.omega, at.u.values, opts.parity, true);
    ev.null_field = rj.null_field;
    ev.sigma_at_crossing = rj.sigma_min;
    branch.events.push_back(std::move(ev));
  }
}

Branch trace_asymmetric_branch(const BifurcationEvent& event, int direction,
                               const KernelCache& cache, double tau, const SpectralPair& plus,
                               const SpectralPair& minus, int steps, double p_minus_step,
                               const NonlinearConfig& config) {
  const Mesh& mesh = cache.mesh();
  Branch branch;
  branch.parameter = "p_minus";
  branch.complete = false;

  Eigen::VectorXcd null_dir = event.null_field;
  const double nn = weighted_norm(mesh, null_dir);
  if (!(nn > 0.0)) throw std::runtime_error("trace_asymmetric_branch: empty null direction");
  null_dir /= nn;
  // align the null direction with +phi_-
  const Complex align = weighted_inner(mesh, minus.phi, null_dir);
  if (std::abs(align) > 0.0) null_dir *= std::conj(align) / std::abs(align);

  const double scale = weighted_norm(mesh, event.u_at_crossing);
  ResonancePoint prev_pt;
  bool switched = false;
  double p1 = 0.0;
  for (double delta : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
    const Eigen::VectorXcd u0 =
        event.u_at_crossing + double(direction) * delta * scale * null_dir;
    const double p_target = weighted_inner(mesh, minus.phi, u0).real();
    if (std::abs(p_target) < 1e-14) continue;
    try {
      prev_pt = solve_nonlinear(cache, tau, plus.phi, PinKind::Coefficient, minus.phi, p_target,
                                event.omega, u0, config);
      // genuine branch switch: the odd coefficient must survive the correction
      const double p_conv = weighted_inner(mesh, minus.phi, prev_pt.u.values).real();
      if (std::abs(p_conv) > 0.25 * std::abs(p_target)) {
        p1 = p_target;
        switched = true;
        break;
      }
    } catch (const std::exception&) {
      continue;
    }
  }
  if (!switched)
    throw std::runtime_error("trace_asymmetric_branch: failed branch switch after delta sweep");

  auto push_point = [&](double p, const ResonancePoint& pt) {
    BranchPoint bp;
    bp.a = p;
    bp.N = pt.amplitude;
    bp.omega = pt.omega;
    bp.u = pt.u.values;
    bp.residual = pt.residual;
    bp.symmetry = pt.symmetry;
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < mesh.size(); ++i)
      (mesh.particle_tag[i] == 1 ? m1 : m2) += mesh.weights[i] * std::norm(bp.u[i]);
    bp.loc_metric = (m1 - m2) / std::max(bp.N, 1e-300);
    bp.branch_id = direction > 0 ? 1 : 2;
    branch.points.push_back(std::move(bp));
  };
  push_point(p1, prev_pt);

  const double dp = double(direction) * std::abs(p_minus_step);
  Eigen::VectorXcd u_prev = event.u_at_crossing;
  Complex om_prev = event.omega;
  double p_prev = 0.0;
  for (int k = 1; k < steps; ++k) {
    const BranchPoint& last = branch.points.back();
    const double p_next = last.a + dp;
    double denom = last.a - p_prev;
    if (std::abs(denom) < 1e-300) denom = dp;
    const double ratio = (p_next - last.a) / denom;
    Eigen::VectorXcd u_pred = last.u + ratio * (last.u - u_prev);
    Complex om_pred = last.omega + ratio * (last.omega - om_prev);
    try {
      const ResonancePoint pt = solve_nonlinear(cache, tau, plus.phi, PinKind::Coefficient,
                                                minus.phi, p_next, om_pred, u_pred, config);
      u_prev = last.u;
      om_prev = last.omega;
      p_prev = last.a;
      push_point(p_next, pt);
    } catch (const std::exception&) {
      branch.complete = false;
      return branch;
    }
  }
  branch.complete = true;
  return branch;
}

TwoDObstructionReport two_d_obstruction(const Mesh& mesh2d, double tau, double N_bound,
                                        const NonlinearConfig& config) {
  if (mesh2d.dim != 2 || mesh2d.spec.shape != DomainSpec::Shape::Dimer)
    throw std::invalid_argument("two_d_obstruction: 2D symmetric dimer required");
  TwoDObstructionReport rep;
  rep.matched_coefficient = -mesh2d.total_measure;
  rep.min_re_phase_term = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 720; ++k) {
    const double dtheta = 2.0 * kPi * k / 720.0;
    rep.min_re_phase_term = std::min(rep.min_re_phase_term, 2.0 + std::cos(2.0 * dtheta));
  }

  KernelCache cache(mesh2d);
  const int n = mesh2d.size();

  // K-tilde top pair: the antisymmetric bulk mode of the dimer
  const auto tpairs = compute_spectrum(mesh2d, OperatorKind::TildeNewtonian, 3);
  rep.ktilde_top_simple = tpairs[0].multiplicity_gap > 1e-6 * std::abs(tpairs[0].lambda);
  rep.ktilde_top_odd = tpairs[0].symmetry == Symmetry::Odd;

  // principal symmetric branch, odd-restricted Jacobian
  SpectralPair cmode;
  cmode.lambda = 0.0;
  cmode.phi = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(mesh2d.total_measure));
  cmode.symmetry = Symmetry::Even;
  cmode.multiplicity_gap = 1.0;
  Branch principal = continue_branch(cache, tau, cmode, N_bound, config);
  DetectionOptions odd_opts;
  odd_opts.parity = Symmetry::Odd;
  detect_symmetry_breaking(principal, cache, tau, cmode, tpairs[0], config, odd_opts);
  rep.events_principal = static_cast<int>(principal.events.size());
  rep.N_reached_principal = principal.points.empty() ? 0.0 : principal.points.back().N;
  if (!principal.points.empty()) {
    rep.sigma_start_principal = principal.points.front().sigma_restricted;
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& p : principal.points) mn = std::min(mn, p.sigma_restricted);
    rep.sigma_min_ratio_principal = mn / rep.sigma_start_principal;
  }
  rep.principal_branch = principal;

  // antisymmetric branch (omega_hat = O(1)), even-restricted Jacobian
  if (rep.ktilde_top_odd) {
    Branch anti = continue_branch(cache, tau, tpairs[0], N_bound, config);
    DetectionOptions even_opts;
    even_opts.parity = Symmetry::Even;
    detect_symmetry_breaking(anti, cache, tau, tpairs[0], cmode, config, even_opts);
    rep.events_antisym = static_cast<int>(anti.events.size());
    rep.N_reached_antisym = anti.points.empty() ? 0.0 : anti.points.back().N;
    if (!anti.points.empty()) {
      double mn = std::numeric_limits<double>::infinity();
      for (const auto& p : anti.points) mn = std::min(mn, p.sigma_restricted);
      rep.sigma_min_ratio_antisym = mn / anti.points.front().sigma_restricted;
    }
    for (auto& bp : anti.points) bp.branch_id = 3;
    rep.antisym_branch = anti;
  }
  return rep;
}

void write_diagram_csv(std::ostream& os, const std::vector<Branch>& branches,
                       const std::vector<BifurcationEvent>& events) {
  os << "N,re_omega,im_omega,sigma_odd,loc_metric,branch_id,symmetry\n";
  os << std::setprecision(16) << std::scientific;
  for (const Branch& b : branches)
    for (const BranchPoint& p : b.points)
      os << p.N << ',' << p.omega.real() << ',' << p.omega.imag() << ',' << p.sigma_restricted
         << ',' << p.loc_metric << ',' << p.branch_id << ',' << to_string(p.symmetry) << '\n';
  for (const BifurcationEvent& e : events)
    os << e.N_crit << ',' << e.omega.real() << ',' << e.omega.imag() << ','
       << e.sigma_at_crossing << ',' << 0.0 << ',' << -1 << ',' << "event" << '\n';
}

void write_prediction_json(std::ostream& os, const ModeCoefficients& coeffs,
                           const BifurcationPrediction& pred) {
  nlohmann::json j;
  j["lambda_plus"] = coeffs.lambda_plus;
  j["lambda_minus"] = coeffs.lambda_minus;
  j["A_pp"] = coeffs.A_pp;
  j["A_pm"] = coeffs.A_pm;
  j["A_mm"] = coeffs.A_mm;
  j["p_plus_star"] = pred.p_plus_star;
  j["omega_hat_star"] = pred.omega_hat_star;
  j["N_crit"] = pred.N_crit_estimate;
  j["assumption_report"] = {
      {"lambda_minus_simple", pred.assumptions.lambda_minus_simple},
      {"lambda_minus_odd", pred.assumptions.lambda_minus_odd},
      {"hybridization_sign", pred.assumptions.hybridization_sign},
      {"antisymmetric_guard", pred.assumptions.antisymmetric_guard},
      {"smallness_ratio", pred.assumptions.smallness_ratio},
      {"pass", pred.assumptions.pass},
  };
  j["case2_precluded"] = pred.case2_precluded;
  os << j.dump(2) << '\n';
}

}  // namespace dires
