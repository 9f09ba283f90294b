// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "dires/mesh.hpp"
#include "dires/nonlinear.hpp"

namespace dires {

// Flat TOML-style key/value file with [section] headers; one file per run so
// experiment records stay diffable.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct RunConfig {
  DomainSpec domain;
  std::vector<double> taus{1e4};  // linear sweep
  double tau_single = 1e4;        // branch/dimer runs
  int mode_index = 0;
  std::string regime = "auto";  // 2D linear solves: auto | principal | bulk
  double N_max = 0.01;
  double N_bound = 1.0;  // 2D obstruction amplitude bound
  int spectrum_k = 6;
  int trace_steps = 10;
  double p_minus_step = 0.05;
  NonlinearConfig nonlinear;
  unsigned seed = 20250808u;
  bool dump_mesh = false;

  static RunConfig from_file(const ConfigFile& cfg);
};

}  // namespace dires
