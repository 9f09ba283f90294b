// SPDX-License-Identifier: Apache-2.0
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dires/dimer.hpp"
#include "dires/threading.hpp"

namespace py = pybind11;
using namespace dires;

namespace {

Eigen::MatrixXd centers_matrix(const Mesh& m) {
  Eigen::MatrixXd c(m.size(), m.dim);
  for (int i = 0; i < m.size(); ++i)
    for (int d = 0; d < m.dim; ++d) c(i, d) = m.centers[i][d];
  return c;
}

}  // namespace

PYBIND11_MODULE(_dires, mod) {
  mod.doc() = "subwavelength dielectric resonance solvers";

  mod.def("set_num_threads", &set_num_threads);

  py::class_<DomainSpec>(mod, "DomainSpec")
      .def_static("ball", &DomainSpec::ball, py::arg("radius"), py::arg("h"))
      .def_static("disk", &DomainSpec::disk, py::arg("radius"), py::arg("h"))
      .def_static("box", &DomainSpec::box, py::arg("dim"), py::arg("extents"), py::arg("h"))
      .def_static("dimer", &DomainSpec::dimer, py::arg("base"), py::arg("L"), py::arg("h"))
      .def_readonly("dimension", &DomainSpec::dimension)
      .def("analytic_measure", &DomainSpec::analytic_measure);

  py::class_<Mesh>(mod, "Mesh")
      .def_property_readonly("size", &Mesh::size)
      .def_readonly("dim", &Mesh::dim)
      .def_readonly("h", &Mesh::h)
      .def_readonly("total_measure", &Mesh::total_measure)
      .def_readonly("weights", &Mesh::weights)
      .def_readonly("particle_tag", &Mesh::particle_tag)
      .def_readonly("reflection_map", &Mesh::reflection_map)
      .def_property_readonly("centers", &centers_matrix)
      .def("symmetric", &Mesh::symmetric);

  mod.def("build_mesh", &build_mesh);
  mod.def("reflect",
          [](const Mesh& m, const Eigen::VectorXcd& v) { return reflect(m, v); });
  mod.def("symmetry_class", [](const Mesh& m, const Eigen::VectorXcd& v, double tol) {
    return to_string(symmetry_class(Field(m, v), tol));
  });

  mod.def("green", [](int dim, Complex omega, double r) {
    return green(KernelParams{dim, omega}, r);
  });
  mod.def("green_series_term_3d", &green_series_term_3d);
  mod.def("eta_omega", &eta_omega);
  mod.def("lambert_w_minus1", &lambert_w_minus1);
  mod.def("principal_2d_leading", &principal_2d_leading);

  mod.def("newtonian_matrix", [](const Mesh& m) { return assemble_newtonian(m).entries; });
  mod.def("helmholtz_matrix",
          [](const Mesh& m, Complex w) { return assemble_helmholtz(m, w).entries; });
  mod.def("tilde_matrix", [](const Mesh& m) { return assemble_tilde(m).entries; });

  py::class_<SpectralPair>(mod, "SpectralPair")
      .def(py::init<>())
      .def_readwrite("lam", &SpectralPair::lambda)
      .def_readwrite("phi", &SpectralPair::phi)
      .def_readonly("multiplicity_gap", &SpectralPair::multiplicity_gap)
      .def_readonly("residual", &SpectralPair::residual)
      .def_property_readonly("symmetry",
                             [](const SpectralPair& p) { return to_string(p.symmetry); });

  mod.def(
      "spectrum",
      [](const Mesh& m, const std::string& kind, int k) {
        const auto ok = kind == "tilde" ? OperatorKind::TildeNewtonian : OperatorKind::Newtonian;
        return compute_spectrum(m, ok, k);
      },
      py::arg("mesh"), py::arg("kind") = "newtonian", py::arg("k") = 6);

  py::class_<KreinRutmanReport>(mod, "KreinRutmanReport")
      .def_readonly("pass_", &KreinRutmanReport::pass)
      .def_readonly("simple", &KreinRutmanReport::simple)
      .def_readonly("relative_gap", &KreinRutmanReport::relative_gap)
      .def_readonly("min_phi0", &KreinRutmanReport::min_phi0);
  mod.def("check_krein_rutman", [](const std::vector<SpectralPair>& p) {
    return check_krein_rutman(p);
  });

  py::class_<DiluteDimerReport>(mod, "DiluteDimerReport")
      .def_readonly("L", &DiluteDimerReport::L)
      .def_readonly("lambda_single", &DiluteDimerReport::lambda_single)
      .def_readonly("k_I", &DiluteDimerReport::k_I)
      .def_readonly("lambda_plus_pred", &DiluteDimerReport::lambda_plus_pred)
      .def_readonly("lambda_minus_pred", &DiluteDimerReport::lambda_minus_pred)
      .def_readonly("lambda_plus_meas", &DiluteDimerReport::lambda_plus_meas)
      .def_readonly("lambda_minus_meas", &DiluteDimerReport::lambda_minus_meas)
      .def_readonly("overlap_plus", &DiluteDimerReport::overlap_plus)
      .def_readonly("overlap_minus", &DiluteDimerReport::overlap_minus);
  mod.def("dilute_dimer_analysis", &dilute_dimer_analysis);

  py::class_<KernelCache>(mod, "KernelCache").def(py::init<const Mesh&>(), py::keep_alive<1, 2>());

  py::class_<ResonancePoint>(mod, "ResonancePoint")
      .def_readonly("omega", &ResonancePoint::omega)
      .def_readonly("omega_hat", &ResonancePoint::omega_hat)
      .def_readonly("tau", &ResonancePoint::tau)
      .def_readonly("residual", &ResonancePoint::residual)
      .def_readonly("amplitude", &ResonancePoint::amplitude)
      .def_property_readonly("u", [](const ResonancePoint& p) { return p.u.values; })
      .def_property_readonly("symmetry",
                             [](const ResonancePoint& p) { return to_string(p.symmetry); });

  mod.def("solve_linear", [](const Mesh& m, double tau, Complex guess, const Eigen::VectorXcd& u) {
    return solve_linear(m, tau, guess, Field(m, u));
  });
  mod.def("asymptotic_linear_3d", &asymptotic_linear_3d);
  mod.def("asymptotic_linear_2d_principal", &asymptotic_linear_2d_principal);
  mod.def("asymptotic_linear_2d_principal_refined", &asymptotic_linear_2d_principal_refined);
  mod.def("asymptotic_linear_2d_bulk", &asymptotic_linear_2d_bulk);

  py::class_<NonlinearConfig>(mod, "NonlinearConfig")
      .def(py::init<>())
      .def_readwrite("newton_tol", &NonlinearConfig::newton_tol)
      .def_readwrite("max_iter", &NonlinearConfig::max_iter)
      .def_readwrite("max_step", &NonlinearConfig::max_step);

  mod.def("kerr_map", [](const Eigen::VectorXcd& u) { return kerr_map(u); });
  mod.def("nl_residual", [](const Mesh& m, double tau, Complex w, const Eigen::VectorXcd& u) {
    return nl_residual(m, tau, w, Field(m, u)).values;
  });
  mod.def("solve_nonlinear_at_amplitude",
          [](const Mesh& m, double tau, double N, const ResonancePoint& seed,
             const Eigen::VectorXd& gauge, const NonlinearConfig& cfg) {
            return solve_nonlinear_at_amplitude(m, tau, N, seed, gauge, cfg);
          });

  py::class_<BranchPoint>(mod, "BranchPoint")
      .def_readonly("a", &BranchPoint::a)
      .def_readonly("N", &BranchPoint::N)
      .def_readonly("omega", &BranchPoint::omega)
      .def_readonly("u", &BranchPoint::u)
      .def_readonly("residual", &BranchPoint::residual)
      .def_readonly("sigma_restricted", &BranchPoint::sigma_restricted)
      .def_readonly("loc_metric", &BranchPoint::loc_metric)
      .def_readonly("branch_id", &BranchPoint::branch_id)
      .def_property_readonly("symmetry",
                             [](const BranchPoint& p) { return to_string(p.symmetry); });
  py::class_<BifurcationEvent>(mod, "BifurcationEvent")
      .def_readonly("N_crit", &BifurcationEvent::N_crit)
      .def_readonly("a_crit", &BifurcationEvent::a_crit)
      .def_readonly("p_plus_sq", &BifurcationEvent::p_plus_sq)
      .def_readonly("omega", &BifurcationEvent::omega)
      .def_readonly("omega_hat", &BifurcationEvent::omega_hat)
      .def_readonly("sigma_at_crossing", &BifurcationEvent::sigma_at_crossing);
  py::class_<Branch>(mod, "Branch")
      .def_readonly("points", &Branch::points)
      .def_readonly("parameter", &Branch::parameter)
      .def_readonly("events", &Branch::events)
      .def_readonly("complete", &Branch::complete)
      .def_readonly("domega_da_abs", &Branch::domega_da_abs)
      .def_readonly("d2omega_da2_abs", &Branch::d2omega_da2_abs);

  mod.def("continue_branch", &continue_branch, py::arg("cache"), py::arg("tau"), py::arg("mode"),
          py::arg("N_max"), py::arg("config") = NonlinearConfig{});

  py::class_<ModeCoefficients>(mod, "ModeCoefficients")
      .def_readonly("lambda_plus", &ModeCoefficients::lambda_plus)
      .def_readonly("lambda_minus", &ModeCoefficients::lambda_minus)
      .def_readonly("A_pp", &ModeCoefficients::A_pp)
      .def_readonly("A_pm", &ModeCoefficients::A_pm)
      .def_readonly("A_mm", &ModeCoefficients::A_mm)
      .def_readonly("A_mp", &ModeCoefficients::A_mp);
  mod.def("mode_coefficients", &mode_coefficients);
  mod.def("mode_coefficients_2d", &mode_coefficients_2d);

  py::class_<BifurcationPrediction>(mod, "BifurcationPrediction")
      .def_readonly("p_plus_star", &BifurcationPrediction::p_plus_star)
      .def_readonly("omega_hat_star", &BifurcationPrediction::omega_hat_star)
      .def_readonly("N_crit_estimate", &BifurcationPrediction::N_crit_estimate)
      .def_readonly("case2_precluded", &BifurcationPrediction::case2_precluded);
  mod.def("reduced_bifurcation_point", &reduced_bifurcation_point);
  py::class_<SecularPoint>(mod, "SecularPoint")
      .def_readonly("omega_hat_sq", &SecularPoint::omega_hat_sq)
      .def_readonly("p_plus_sq", &SecularPoint::p_plus_sq)
      .def_readonly("delta_theta", &SecularPoint::delta_theta);
  mod.def("reduced_secular_solve", &reduced_secular_solve);

  mod.def(
      "detect_symmetry_breaking",
      [](Branch branch, const KernelCache& cache, double tau, const SpectralPair& plus,
         const SpectralPair& minus, const NonlinearConfig& cfg) {
        detect_symmetry_breaking(branch, cache, tau, plus, minus, cfg);
        return branch;
      },
      py::arg("branch"), py::arg("cache"), py::arg("tau"), py::arg("plus"), py::arg("minus"),
      py::arg("config") = NonlinearConfig{});
  mod.def("trace_asymmetric_branch", &trace_asymmetric_branch, py::arg("event"),
          py::arg("direction"), py::arg("cache"), py::arg("tau"), py::arg("plus"),
          py::arg("minus"), py::arg("steps"), py::arg("p_minus_step"),
          py::arg("config") = NonlinearConfig{});

  py::class_<TwoDObstructionReport>(mod, "TwoDObstructionReport")
      .def_readonly("events_principal", &TwoDObstructionReport::events_principal)
      .def_readonly("events_antisym", &TwoDObstructionReport::events_antisym)
      .def_readonly("sigma_min_ratio_principal",
                    &TwoDObstructionReport::sigma_min_ratio_principal)
      .def_readonly("sigma_min_ratio_antisym", &TwoDObstructionReport::sigma_min_ratio_antisym)
      .def_readonly("N_reached_principal", &TwoDObstructionReport::N_reached_principal)
      .def_readonly("min_re_phase_term", &TwoDObstructionReport::min_re_phase_term)
      .def_readonly("matched_coefficient", &TwoDObstructionReport::matched_coefficient)
      .def_readonly("ktilde_top_simple", &TwoDObstructionReport::ktilde_top_simple)
      .def_readonly("ktilde_top_odd", &TwoDObstructionReport::ktilde_top_odd);
  mod.def("two_d_obstruction", &two_d_obstruction, py::arg("mesh"), py::arg("tau"),
          py::arg("N_bound"), py::arg("config") = NonlinearConfig{});
}
