#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmpw/errors.hpp"
#include "cmpw/experiments.hpp"
#include "cmpw/io.hpp"

namespace {

struct CommonOpts {
  std::string config;
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, CommonOpts& o, bool config_required) {
  auto* copt = sub->add_option("--config", o.config,
                               "experiment config file (JSON)");
  if (config_required) copt->required();
  sub->add_option("--out", o.out, "output directory (overrides config)");
  sub->add_option("--seed", o.seed, "solver seed (overrides config)");
  sub->add_option("--format", o.format, "data file format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

void apply_overrides(const CLI::App* sub, const CommonOpts& o,
                     cmpw::ExperimentConfig& cfg) {
  if (sub->count("--out")) cfg.out_dir = o.out;
  if (sub->count("--seed")) cfg.seed = o.seed;
  if (sub->count("--format")) cfg.format = o.format;
}

int finish(const cmpw::RunReport& rep, const std::string& out_dir) {
  int passed = 0;
  for (const cmpw::CheckResult& c : rep.checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " = "
              << cmpw::format_double(c.value) << "\n";
    if (c.pass) ++passed;
  }
  std::cout << rep.experiment << ": " << passed << "/" << rep.checks.size()
            << " checks passed; outputs in " << out_dir << "\n";
  return rep.all_passed ? 0 : 1;
}

int run_with(const CLI::App* sub, const CommonOpts& o,
             const std::vector<std::string>& allowed) {
  cmpw::ExperimentConfig cfg = cmpw::load_config(o.config);
  if (!allowed.empty() &&
      std::find(allowed.begin(), allowed.end(), cfg.experiment) ==
          allowed.end()) {
    std::string list;
    for (const std::string& a : allowed) list += (list.empty() ? "" : ", ") + a;
    cmpw::fail(cmpw::Err::ConfigInvalid,
               "experiment '" + cfg.experiment +
                   "' does not belong to this subcommand (expected one of " +
                   list + ")");
  }
  apply_overrides(sub, o, cfg);
  return finish(cmpw::run_experiment(cfg), cfg.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compressed modes and compressed plane wave toolkit"};
  app.require_subcommand(1);

  CommonOpts cm_o, cpw_o, tr_o, st_o, rep_o;
  std::string figure_id;

  CLI::App* cm = app.add_subcommand(
      "cm", "compressed mode experiments (cm-gallery, eigenfunctions)");
  add_common(cm, cm_o, true);
  CLI::App* cpw = app.add_subcommand(
      "cpw", "plane wave ladder experiments (bcpw-gallery, spectral-weights)");
  add_common(cpw, cpw_o, true);
  CLI::App* tr = app.add_subcommand(
      "transform", "transform experiments (transform-demo, windowed-demo)");
  add_common(tr, tr_o, true);
  CLI::App* st = app.add_subcommand(
      "study",
      "studies (completeness, energy-convergence, table1, cpw-eigs)");
  add_common(st, st_o, true);
  CLI::App* rep = app.add_subcommand(
      "reproduce", "run the built-in parameter set for a figure or table");
  rep->add_option("figure", figure_id, "figure id (fig3..fig13, table1)")
      ->required();
  add_common(rep, rep_o, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cm->parsed())
      return run_with(cm, cm_o, {"cm-gallery", "eigenfunctions"});
    if (cpw->parsed())
      return run_with(cpw, cpw_o, {"bcpw-gallery", "spectral-weights"});
    if (tr->parsed())
      return run_with(tr, tr_o, {"transform-demo", "windowed-demo"});
    if (st->parsed())
      return run_with(st, st_o,
                      {"completeness", "energy-convergence", "table1",
                       "cpw-eigs"});
    if (rep->parsed()) {
      cmpw::ExperimentConfig cfg = rep_o.config.empty()
                                       ? cmpw::stock_config(figure_id)
                                       : cmpw::load_config(rep_o.config);
      if (rep->count("--out") == 0 && rep_o.config.empty())
        cfg.out_dir = "reproduce_" + figure_id;
      apply_overrides(rep, rep_o, cfg);
      return finish(cmpw::run_experiment(cfg), cfg.out_dir);
    }
  } catch (const cmpw::Error& e) {
    std::cerr << "error [" << cmpw::err_name(e.code) << "]: " << e.what()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
