#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "anosov/model.hpp"

namespace anosov {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, const std::string& what) : std::runtime_error(where + ": " + what) {}
};

struct ExperimentConfig {
  ModelParams model;

  // conjugacy
  double conj_tol = 1e-9;
  int conj_nodes_per_unit = 256;
  std::string grid_path;  // empty: <out>/conjugacy_grid.bin

  // cones, tangency, persistence
  std::size_t cone_samples = 100000;
  double cone_epsilon = 0.1;
  int tangency_scales = 12;
  double tangency_rho_max = 0.2;
  std::size_t persistence_grid = 512;
  int persistence_M = 5;
  std::vector<double> persistence_ts{0.25, 0.5, 0.9, 1.0};

  // Hölder and beak
  std::size_t holder_pairs = 1000;
  double holder_scale0 = -1.0;  // negative: r/10
  int holder_scales = 12;
  std::size_t beak_samples = 1000;

  // spectrum
  int period_cap = 6;
  int probe_n = 100;

  // shadowing
  int shadow_window = 6;
  std::vector<double> shadow_xis{1e-3, 1e-4, 1e-5};
  std::vector<double> fisher_eps{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  int fisher_window = 60;

  std::uint64_t seed = 1;
  std::string out = "anosov-out";
};

// Flat key=value text with '#' comments; keys are dotted (map.k, holder.pairs, ...).
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);
// Every key, one per line, doubles in round-trip precision.
std::string to_text(const ExperimentConfig& cfg);
// ANOSOV_<KEY> with dots as underscores, upper case (ANOSOV_MAP_K=7). Returns the keys applied.
std::vector<std::string> apply_env(ExperimentConfig& cfg, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> config_entries(const ExperimentConfig& cfg);
std::vector<std::string> config_keys();
std::string env_name(const std::string& key);

}  // namespace anosov
