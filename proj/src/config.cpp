// SPDX-License-Identifier: Apache-2.0
#include "dires/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dires {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

ConfigFile ConfigFile::parse_string(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config: malformed section at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error("config: empty key at line " + std::to_string(lineno));
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end() || !s->second.count(key))
    throw std::runtime_error("config: missing key [" + section + "] " + key);
  return s->second.at(key);
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
  const std::string v = get_string(section, key);
  size_t pos = 0;
  const double d = std::stod(v, &pos);
  if (pos != v.size())
    throw std::runtime_error("config: expected number for [" + section + "] " + key);
  return d;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
  if (!has(section, key)) return fallback;
  return static_cast<int>(get_double(section, key));
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("config: expected boolean for [" + section + "] " + key);
}

std::vector<double> ConfigFile::get_list(const std::string& section, const std::string& key) const {
  const std::string v = get_string(section, key);
  std::vector<double> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::runtime_error("config: empty list for [" + section + "] " + key);
  return out;
}

RunConfig RunConfig::from_file(const ConfigFile& cfg) {
  RunConfig rc;
  const std::string shape = cfg.get_string("domain", "shape");
  const double h = cfg.get_double("domain", "resolution");
  if (shape == "ball") {
    rc.domain = DomainSpec::ball(cfg.get_double("domain", "radius"), h);
  } else if (shape == "disk") {
    rc.domain = DomainSpec::disk(cfg.get_double("domain", "radius"), h);
  } else if (shape == "box") {
    const int dim = cfg.get_int("domain", "dimension", 3);
    rc.domain = DomainSpec::box(dim,
                                {cfg.get_double("domain", "extent_x"),
                                 cfg.get_double("domain", "extent_y"),
                                 cfg.get_double("domain", "extent_z", 1.0)},
                                h);
  } else if (shape == "dimer") {
    const std::string bs = cfg.get_string("domain", "base_shape");
    DomainSpec base;
    if (bs == "ball")
      base = DomainSpec::ball(cfg.get_double("domain", "base_radius"), h);
    else if (bs == "disk")
      base = DomainSpec::disk(cfg.get_double("domain", "base_radius"), h);
    else
      throw std::runtime_error("config: unsupported dimer base shape '" + bs + "'");
    rc.domain = DomainSpec::dimer(base, cfg.get_double("domain", "half_separation"), h);
  } else {
    throw std::runtime_error("config: unknown shape '" + shape + "'");
  }
  rc.domain.validate();

  if (cfg.has("linear", "tau")) rc.taus = cfg.get_list("linear", "tau");
  rc.tau_single = cfg.get_double("branch", "tau", cfg.get_double("dimer", "tau", rc.taus.front()));
  for (double t : rc.taus)
    if (!(t > 0.0)) throw std::runtime_error("config: tau values must be positive");
  if (!(rc.tau_single > 0.0)) throw std::runtime_error("config: tau must be positive");

  rc.mode_index = cfg.get_int("linear", "mode_index", cfg.get_int("branch", "mode_index", 0));
  rc.regime = cfg.get_string("linear", "regime", "auto");
  rc.spectrum_k = cfg.get_int("spectrum", "k", 6);
  rc.N_max = cfg.get_double("branch", "n_max", cfg.get_double("dimer", "n_max", 0.01));
  rc.N_bound = cfg.get_double("dimer", "n_bound", 1.0);
  rc.trace_steps = cfg.get_int("dimer", "trace_steps", 10);
  rc.p_minus_step = cfg.get_double("dimer", "p_minus_step", 0.05);
  rc.nonlinear.newton_tol = cfg.get_double("tolerances", "newton_tol", 1e-11);
  rc.nonlinear.max_iter = cfg.get_int("tolerances", "max_iter", 40);
  rc.nonlinear.max_step =
      cfg.get_double("branch", "step", cfg.get_double("dimer", "step", 0.05));
  rc.seed = static_cast<unsigned>(cfg.get_int("output", "seed", 20250808));
  rc.dump_mesh = cfg.get_bool("output", "dump_mesh", false);

  if (!(rc.N_max > 0.0) || !(rc.N_bound > 0.0) || !(rc.nonlinear.max_step > 0.0) ||
      !(rc.nonlinear.newton_tol > 0.0))
    throw std::runtime_error("config: amplitude and tolerance parameters must be positive");
  return rc;
}

}  // namespace dires
