#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmpw/cm_solver.hpp"

namespace cmpw {

/// One validated run request. Parsed from a versioned JSON document with
/// unknown keys rejected; every run needs an explicit seed.
struct ExperimentConfig {
  std::string experiment;
  // grid
  double L = 50.0;
  int n = 512;
  // potential
  std::string potential = "free";
  double v0 = 1.0;
  double well_width = 3.0;
  int wells = 0;  // 0 selects one well per 10 length units
  int impurity_site = 0;
  double impurity_factor = 2.0;
  // solver
  std::vector<double> mu = {30.0};
  std::vector<int> n_list;
  int n_modes = 5;
  int m_ref = 0;  // 0 selects n_modes
  std::optional<std::uint64_t> seed;
  double tol_split = 1e-6;
  double tol_obj = 1e-8;
  int max_iter = 20000;
  int band_p = 0;
  /// "weighted": mu values are used as-is; "figure": mu values follow the
  /// unit-vector normalization common in plots and are rescaled by sqrt(dx).
  std::string mu_units = "weighted";
  std::string stencil = "fd";  // fd | spectral
  // cpw
  double cpw_w = 5.0;
  int cpw_levels = 6;
  double cpw_mu = 5.0;
  // transform
  int window_start = 0;
  int window_length = 0;  // 0 selects the state's support box
  std::vector<int> topk = {20, 30, 40, 50, 60, 70};
  int states = 4;
  // output
  std::string out_dir = ".";
  std::string format = "csv";
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
};

struct RunReport {
  std::string experiment;
  bool all_passed = false;
  std::vector<CheckResult> checks;
  nlohmann::ordered_json metrics;
  std::vector<std::string> files;
  nlohmann::ordered_json config_echo;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::ordered_json config_json(const ExperimentConfig& cfg);

/// Built-in parameter sets for `reproduce`; ids like "fig3", "table1".
ExperimentConfig stock_config(const std::string& figure_id);
std::vector<std::string> known_experiments();
std::vector<std::string> known_figures();

RunReport run_experiment(const ExperimentConfig& cfg);
RunReport completeness_study(const ExperimentConfig& cfg);
RunReport energy_convergence_study(const ExperimentConfig& cfg);
RunReport table1_study(const ExperimentConfig& cfg);

/// report.json (stable key order; includes runtimes, so reruns compare data
/// files rather than the report).
void write_report(const std::string& path, const RunReport& rep);

/// Helpers shared with the CLI and tests.
HamiltonianOp make_operator(const ExperimentConfig& cfg);
double mapped_mu(const ExperimentConfig& cfg, double mu_value);

}  // namespace cmpw
