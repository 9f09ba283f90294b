// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>

#include "dires/config.hpp"
#include "dires/dimer.hpp"
#include "dires/threading.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  bool dump_matrices = false;
};

json config_echo(const dires::ConfigFile& cfg) {
  json j;
  for (const auto& [section, kv] : cfg.sections()) {
    json s;
    for (const auto& [k, v] : kv) s[k] = v;
    j[section.empty() ? "(root)" : section] = s;
  }
  return j;
}

void write_manifest(const CliOptions& opts, const dires::ConfigFile& cfg,
                    const std::string& command, const std::vector<std::string>& outputs,
                    const std::string& status) {
  json j;
  j["artifact"] = "dires";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = config_echo(cfg);
  j["outputs"] = outputs;
  j["status"] = status;
  j["threads"] = dires::num_threads();
  std::ofstream out(fs::path(opts.out_dir) / "MANIFEST.json");
  out << j.dump(2) << '\n';
}

std::ofstream open_output(const CliOptions& opts, const std::string& name,
                          std::vector<std::string>& outputs, bool binary = false) {
  fs::create_directories(opts.out_dir);
  const fs::path p = fs::path(opts.out_dir) / name;
  outputs.push_back(name);
  return std::ofstream(p, binary ? std::ios::binary : std::ios::out);
}

// For 2D runs a near-constant gauge mode selects the principal (Lambert-W)
// regime; eigenmodes of the mean-zero operator select the bulk regime.
dires::SpectralPair principal_mode_2d(const dires::Mesh& mesh) {
  dires::SpectralPair m;
  m.lambda = 0.0;
  m.phi = Eigen::VectorXd::Constant(mesh.size(), 1.0 / std::sqrt(mesh.total_measure));
  m.symmetry = mesh.symmetric() ? dires::Symmetry::Even : dires::Symmetry::None;
  m.multiplicity_gap = 1.0;
  return m;
}

int run_spectrum(const dires::RunConfig& rc, const dires::ConfigFile& cfg,
                 const CliOptions& opts) {
  std::vector<std::string> outputs;
  const dires::Mesh mesh = dires::build_mesh(rc.domain);
  if (rc.dump_mesh) {
    auto f = open_output(opts, "mesh.csv", outputs);
    mesh.dump_csv(f);
  }
  const auto kind = mesh.dim == 2 && cfg.get_string("spectrum", "operator", "newtonian") == "tilde"
                        ? dires::OperatorKind::TildeNewtonian
                        : dires::OperatorKind::Newtonian;
  const auto pairs = dires::compute_spectrum(mesh, kind, rc.spectrum_k);
  {
    auto f = open_output(opts, "spectrum.csv", outputs);
    dires::write_spectrum_csv(f, pairs);
  }
  if (mesh.dim == 3) {
    const auto kr = dires::check_krein_rutman(pairs);
    json j;
    j["pass"] = kr.pass;
    j["lambda0_simple"] = kr.simple;
    j["relative_gap"] = kr.relative_gap;
    j["min_phi0"] = kr.min_phi0;
    j["offending_cell"] = kr.offending_cell;
    auto f = open_output(opts, "krein_rutman.json", outputs);
    f << j.dump(2) << '\n';
  }
  if (opts.dump_matrices && mesh.size() <= 4096) {
    const auto op = kind == dires::OperatorKind::TildeNewtonian ? dires::assemble_tilde(mesh)
                                                                : dires::assemble_newtonian(mesh);
    auto f = open_output(opts, "operator.bin", outputs, true);
    dires::dump_matrix(f, op);
  }
  write_manifest(opts, cfg, "spectrum", outputs, "complete");
  return 0;
}

int run_linear(const dires::RunConfig& rc, const dires::ConfigFile& cfg, const CliOptions& opts) {
  std::vector<std::string> outputs;
  const dires::Mesh mesh = dires::build_mesh(rc.domain);
  dires::KernelCache cache(mesh);

  dires::SpectralPair mode;
  bool principal2d = false;
  if (mesh.dim == 3) {
    const auto pairs =
        dires::compute_spectrum(mesh, dires::OperatorKind::Newtonian, rc.mode_index + 2);
    mode = pairs[rc.mode_index];
  } else if (rc.regime == "principal" || (rc.regime == "auto" && rc.mode_index < 0)) {
    mode = principal_mode_2d(mesh);
    principal2d = true;
  } else {
    const auto pairs = dires::compute_spectrum(mesh, dires::OperatorKind::TildeNewtonian,
                                               std::max(rc.mode_index, 0) + 2);
    mode = pairs[std::max(rc.mode_index, 0)];
  }

  auto f = open_output(opts, "linear.csv", outputs);
  f << "tau,re_omega,im_omega,residual,symmetry,mode_index\n";
  f << std::setprecision(16) << std::scientific;
  for (double tau : rc.taus) {
    dires::Complex seed;
    if (mesh.dim == 3)
      seed = dires::asymptotic_linear_3d(mode, mesh, tau);
    else if (principal2d)
      seed = dires::asymptotic_linear_2d_principal_refined(mesh.total_measure, tau);
    else
      seed = dires::asymptotic_linear_2d_bulk(mode.lambda, tau);
    const auto pt = dires::solve_linear(cache, tau, seed, mode.phi.cast<dires::Complex>());
    f << tau << ',' << pt.omega.real() << ',' << pt.omega.imag() << ',' << pt.residual << ','
      << dires::to_string(pt.symmetry) << ',' << (principal2d ? -1 : rc.mode_index) << '\n';
    if (opts.dump_matrices && mesh.size() <= 4096) {
      const auto op = dires::assemble_helmholtz(mesh, pt.omega);
      auto fb = open_output(opts, "helmholtz_tau" + std::to_string(tau) + ".bin", outputs, true);
      dires::dump_matrix(fb, op);
    }
  }
  write_manifest(opts, cfg, "linear", outputs, "complete");
  return 0;
}

int run_branch(const dires::RunConfig& rc, const dires::ConfigFile& cfg, const CliOptions& opts) {
  std::vector<std::string> outputs;
  const dires::Mesh mesh = dires::build_mesh(rc.domain);
  dires::KernelCache cache(mesh);

  dires::SpectralPair mode;
  if (mesh.dim == 3) {
    const auto pairs =
        dires::compute_spectrum(mesh, dires::OperatorKind::Newtonian, rc.mode_index + 2);
    mode = pairs[rc.mode_index];
  } else if (rc.regime == "principal" || (rc.regime == "auto" && rc.mode_index < 0)) {
    mode = principal_mode_2d(mesh);
  } else {
    const auto pairs = dires::compute_spectrum(mesh, dires::OperatorKind::TildeNewtonian,
                                               std::max(rc.mode_index, 0) + 2);
    mode = pairs[std::max(rc.mode_index, 0)];
  }

  const double tau = rc.tau_single;
  const dires::Branch branch = dires::continue_branch(cache, tau, mode, rc.N_max, rc.nonlinear);
  {
    auto f = open_output(opts, "branch.csv", outputs);
    dires::write_branch_csv(f, branch);
  }
  {
    json j;
    j["tau"] = tau;
    j["parameter"] = branch.parameter;
    j["complete"] = branch.complete;
    j["points"] = branch.points.size();
    j["domega_da_abs"] = branch.domega_da_abs;
    j["d2omega_da2_abs"] = branch.d2omega_da2_abs;
    j["config"] = config_echo(cfg);
    auto f = open_output(opts, "branch_manifest.json", outputs);
    f << j.dump(2) << '\n';
  }
  write_manifest(opts, cfg, "branch", outputs,
                 branch.complete ? "complete" : "partial: continuation aborted");
  return branch.complete ? 0 : 1;
}

int run_dimer(const dires::RunConfig& rc, const dires::ConfigFile& cfg, const CliOptions& opts) {
  std::vector<std::string> outputs;
  if (rc.domain.shape != dires::DomainSpec::Shape::Dimer)
    throw std::runtime_error("cmd_dimer: config domain must be a symmetric dimer");
  const dires::Mesh mesh = dires::build_mesh(rc.domain);
  const double tau = rc.tau_single;

  if (mesh.dim == 2) {
    const auto rep = dires::two_d_obstruction(mesh, tau, rc.N_bound, rc.nonlinear);
    {
      auto f = open_output(opts, "diagram.csv", outputs);
      dires::write_diagram_csv(f, {rep.principal_branch, rep.antisym_branch}, {});
    }
    json j;
    j["events_principal"] = rep.events_principal;
    j["events_antisym"] = rep.events_antisym;
    j["sigma_min_ratio_principal"] = rep.sigma_min_ratio_principal;
    j["sigma_min_ratio_antisym"] = rep.sigma_min_ratio_antisym;
    j["N_reached_principal"] = rep.N_reached_principal;
    j["N_reached_antisym"] = rep.N_reached_antisym;
    j["min_re_phase_term"] = rep.min_re_phase_term;
    j["matched_coefficient"] = rep.matched_coefficient;
    j["ktilde_top_simple"] = rep.ktilde_top_simple;
    j["ktilde_top_odd"] = rep.ktilde_top_odd;
    auto f = open_output(opts, "obstruction.json", outputs);
    f << j.dump(2) << '\n';
    write_manifest(opts, cfg, "dimer", outputs, "complete");
    return 0;
  }

  dires::KernelCache cache(mesh);
  const auto pairs =
      dires::compute_spectrum(mesh, dires::OperatorKind::Newtonian, std::max(rc.spectrum_k, 3));
  {
    auto f = open_output(opts, "spectrum.csv", outputs);
    dires::write_spectrum_csv(f, pairs);
  }
  const auto coeffs = dires::mode_coefficients(mesh, pairs[0], pairs[1]);
  const auto pred = dires::reduced_bifurcation_point(coeffs);
  {
    auto f = open_output(opts, "prediction.json", outputs);
    dires::write_prediction_json(f, coeffs, pred);
  }

  const double n_max =
      cfg.has("dimer", "n_max") ? rc.N_max : 1.8 * pred.N_crit_estimate;
  dires::Branch sym = dires::continue_branch(cache, tau, pairs[0], n_max, rc.nonlinear);
  dires::detect_symmetry_breaking(sym, cache, tau, pairs[0], pairs[1], rc.nonlinear);

  std::vector<dires::Branch> branches{sym};
  if (!sym.events.empty()) {
    for (int dir : {+1, -1})
      branches.push_back(dires::trace_asymmetric_branch(sym.events.front(), dir, cache, tau,
                                                        pairs[0], pairs[1], rc.trace_steps,
                                                        rc.p_minus_step, rc.nonlinear));
  }
  {
    auto f = open_output(opts, "diagram.csv", outputs);
    dires::write_diagram_csv(f, branches, sym.events);
  }
  write_manifest(opts, cfg, "dimer", outputs,
                 sym.complete ? "complete" : "partial: symmetric branch aborted");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dires: subwavelength dielectric resonance solver suite"};
  app.require_subcommand(1);

  CliOptions opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "run configuration file")->required();
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
    sub->add_flag("--dump-matrices", opts.dump_matrices, "dump assembled operators (binary)");
  };
  CLI::App* spectrum = app.add_subcommand("spectrum", "leading eigenpairs of the static potential");
  CLI::App* linear = app.add_subcommand("linear", "linear subwavelength resonances over a tau sweep");
  CLI::App* branch = app.add_subcommand("branch", "nonlinear amplitude continuation of one mode");
  CLI::App* dimer = app.add_subcommand("dimer", "symmetry-breaking pipeline for a symmetric dimer");
  for (auto* sub : {spectrum, linear, branch, dimer}) add_common(sub);

  CLI11_PARSE(app, argc, argv);
  dires::set_num_threads(opts.threads);

  dires::ConfigFile cfg;
  dires::RunConfig rc;
  try {
    cfg = dires::ConfigFile::parse_file(opts.config_path);
    rc = dires::RunConfig::from_file(cfg);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (spectrum->parsed()) return run_spectrum(rc, cfg, opts);
    if (linear->parsed()) return run_linear(rc, cfg, opts);
    if (branch->parsed()) return run_branch(rc, cfg, opts);
    if (dimer->parsed()) return run_dimer(rc, cfg, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    std::vector<std::string> outputs;
    write_manifest(opts, cfg, app.get_subcommands().front()->get_name(), outputs,
                   std::string("incomplete: ") + e.what());
    return 1;
  }
  return 2;
}
