#include "cmpw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cmpw/cpw_builder.hpp"
#include "cmpw/cpw_transform.hpp"
#include "cmpw/eigenref.hpp"
#include "cmpw/errors.hpp"
#include "cmpw/fourier.hpp"
#include "cmpw/io.hpp"

namespace cmpw {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

void check_keys(const json& o, const char* where,
                std::initializer_list<const char*> allowed) {
  for (auto it = o.begin(); it != o.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    require(ok, Err::ConfigInvalid,
            "unknown config key '" + it.key() + "' in " + where);
  }
}

double get_num(const json& o, const char* key, double dflt) {
  if (!o.contains(key)) return dflt;
  require(o[key].is_number(), Err::ConfigInvalid,
          std::string(key) + " must be a number");
  return o[key].get<double>();
}

int get_int(const json& o, const char* key, int dflt) {
  if (!o.contains(key)) return dflt;
  require(o[key].is_number_integer(), Err::ConfigInvalid,
          std::string(key) + " must be an integer");
  return o[key].get<int>();
}

std::string get_str(const json& o, const char* key, const std::string& dflt) {
  if (!o.contains(key)) return dflt;
  require(o[key].is_string(), Err::ConfigInvalid,
          std::string(key) + " must be a string");
  return o[key].get<std::string>();
}

std::vector<double> get_num_list(const json& v, const char* key) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      require(e.is_number(), Err::ConfigInvalid,
              std::string(key) + " entries must be numbers");
      out.push_back(e.get<double>());
    }
  } else {
    fail(Err::ConfigInvalid, std::string(key) + " must be a number or array");
  }
  return out;
}

std::vector<int> get_int_list(const json& v, const char* key) {
  std::vector<int> out;
  require(v.is_array(), Err::ConfigInvalid,
          std::string(key) + " must be an array");
  for (const auto& e : v) {
    require(e.is_number_integer(), Err::ConfigInvalid,
            std::string(key) + " entries must be integers");
    out.push_back(e.get<int>());
  }
  return out;
}

std::string one_of_msg(const char* key, const char* values) {
  return std::string(key) + " must be one of " + values;
}

/// Filename-safe label for a numeric parameter (decimal point -> 'p').
std::string num_label(double v) {
  std::string s = format_double(v);
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

struct Ctx {
  const ExperimentConfig& cfg;
  fs::path out;
  RunReport rep;

  explicit Ctx(const ExperimentConfig& c) : cfg(c), out(c.out_dir) {
    fs::create_directories(out);
    rep.experiment = c.experiment;
    rep.config_echo = config_json(c);
    rep.metrics = ordered_json::object();
  }

  void check(const std::string& name, bool pass, double value) {
    rep.checks.push_back({name, pass, value});
  }

  void add_file(const std::string& name) { rep.files.push_back(name); }

  std::string path(const std::string& name) const {
    return (out / name).string();
  }
};

void write_json_file(const std::string& path, const ordered_json& j) {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), Err::WriteFailed, "cannot open " + path);
  f << j.dump(2) << "\n";
  require(f.good(), Err::WriteFailed, "short write to " + path);
}

/// Data table in the configured format; registers the file in the report.
void emit_table(Ctx& ctx, const std::string& base,
                const std::vector<std::string>& notes,
                const std::vector<std::string>& columns,
                const std::vector<std::vector<double>>& rows) {
  if (ctx.cfg.format == "csv") {
    write_table_csv(ctx.path(base + ".csv"), notes, columns, rows);
    ctx.add_file(base + ".csv");
  } else {
    ordered_json j;
    j["version"] = kVersion;
    j["notes"] = notes;
    j["columns"] = columns;
    j["rows"] = rows;
    write_json_file(ctx.path(base + ".json"), j);
    ctx.add_file(base + ".json");
  }
}

void emit_modeset(Ctx& ctx, const std::string& base, const ModeSet& ms,
                  std::vector<std::string> notes) {
  if (ctx.cfg.format == "csv") {
    write_modeset_csv(ctx.path(base + ".csv"), ms, notes);
    ctx.add_file(base + ".csv");
    return;
  }
  std::vector<std::string> cols = {"x"};
  for (int j = 0; j < ms.count(); ++j)
    cols.push_back("mode_" + std::to_string(j + 1));
  std::vector<std::vector<double>> rows(ms.grid.n);
  for (int i = 0; i < ms.grid.n; ++i) {
    rows[i].push_back(ms.grid.node(i));
    for (int j = 0; j < ms.count(); ++j) rows[i].push_back(ms.modes(i, j));
  }
  emit_table(ctx, base, notes, cols, rows);
}

SolveOptions solver_options(const ExperimentConfig& cfg) {
  require(cfg.seed.has_value(), Err::ConfigInvalid,
          "solver.seed is required to run an experiment");
  SolveOptions o;
  o.max_iter = cfg.max_iter;
  o.tol_split = cfg.tol_split;
  o.tol_obj = cfg.tol_obj;
  o.seed = *cfg.seed;
  o.band_p = cfg.band_p;
  return o;
}

CpwOptions cpw_options(const ExperimentConfig& cfg) {
  CpwOptions o;
  o.levels = cfg.cpw_levels;
  return o;
}

double ortho_deviation(const PeriodicGrid& g, const Eigen::MatrixXd& m) {
  Eigen::MatrixXd gram = g.dx * (m.transpose() * m);
  gram.diagonal().array() -= 1.0;
  return gram.cwiseAbs().maxCoeff();
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int m = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// Magnitudes of the real-DFT coefficients (same comparison basis as
/// topk_error), sorted descending.
std::vector<double> fourier_magnitudes(const PeriodicGrid& g, const Field& f) {
  const CVec c = spectrum(g, f);
  const double s2 = std::sqrt(2.0);
  std::vector<double> mags;
  mags.reserve(g.n);
  mags.push_back(std::abs(c[0].real()));
  for (int m = 1; m < g.n / 2; ++m) {
    mags.push_back(std::abs(s2 * c[m].real()));
    mags.push_back(std::abs(s2 * c[m].imag()));
  }
  mags.push_back(std::abs(c[g.n / 2].real()));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  return mags;
}

std::vector<double> cpw_magnitudes(const CpwCoeffs& c) {
  std::vector<double> mags;
  mags.reserve(static_cast<size_t>(c.n_max) * c.N0);
  for (int l = 0; l < c.n_max; ++l)
    for (int j = 0; j < c.N0; ++j) mags.push_back(std::abs(c.values(l, j)));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  return mags;
}

Eigen::MatrixXd reference_states(const HamiltonianOp& op, int count) {
  return reference_eigenpairs(op, count).vectors;
}

// ---------------------------------------------------------------------------
// Experiment bodies
// ---------------------------------------------------------------------------

RunReport run_cm_gallery(const ExperimentConfig& cfg) {
  Ctx ctx(cfg);
  const HamiltonianOp op = make_operator(cfg);
  const SolveOptions opts = solver_options(cfg);

  std::vector<std::future<SolveResult>> jobs;
  for (double mu_cfg : cfg.mu) {
    const double mu = mapped_mu(cfg, mu_cfg);
    jobs.push_back(std::async(std::launch::async, [&, mu] {
      return solve_cm(op, cfg.n_modes, mu, opts);
    }));
  }

  ordered_json per_mu = ordered_json::array();
  for (size_t i = 0; i < jobs.size(); ++i) {
    const SolveResult res = jobs[i].get();
    const std::string label = num_label(cfg.mu[i]);
    emit_modeset(ctx, "modes_mu" + label, res.modes,
                 {"figure: fig3", "compressed mode gallery, mu(config)=" +
                                      format_double(cfg.mu[i])});
    const double dev = ortho_deviation(res.modes.grid, res.modes.modes);
    ctx.check("orthonormal_mu" + label, dev <= 1e-6, dev);
    ctx.check("converged_mu" + label, res.converged,
              static_cast<double>(res.state.iter));
    double sup = 0.0;
    for (int j = 0; j < res.modes.count(); ++j)
      sup += support_measure(res.modes.grid, res.modes.modes.col(j));
    ordered_json m;
    m["mu_config"] = cfg.mu[i];
    m["mu_solver"] = res.modes.mu;
    m["objective"] = res.modes.objective;
    m["iterations"] = res.state.iter;
    m["ortho_deviation"] = dev;
    m["total_support"] = sup;
    per_mu.push_back(m);
  }
  ctx.rep.metrics["sweep"] = per_mu;
  return ctx.rep;
}

RunReport run_eigenfunctions(const ExperimentConfig& cfg) {
  Ctx ctx(cfg);
  const HamiltonianOp op = make_operator(cfg);
  const int m = cfg.m_ref > 0 ? cfg.m_ref : cfg.n_modes;
  const EigenPairs pairs = reference_eigenpairs(op, m);

  std::vector<std::string> cols = {"x", "potential"};
  for (int j = 0; j < m; ++j) cols.push_back("phi_" + std::to_string(j + 1));
  std::vector<std::vector<double>> rows(op.grid.n);
  for (int i = 0; i < op.grid.n; ++i) {
    rows[i].push_back(op.grid.node(i));
    rows[i].push_back(op.potential.values[i]);
    for (int j = 0; j < m; ++j) rows[i].push_back(pairs.vectors(i, j));
  }
  emit_table(ctx, "eigenfunctions",
             {"figure: fig4", "reference eigenfunctions, potential=" +
                                  cfg.potential},
             cols, rows);

  std::vector<std::vector<double>> vrows;
  for (int j = 0; j < m; ++j)
    vrows.push_back({static_cast<double>(j + 1), pairs.values[j]});
  emit_table(ctx, "eigenvalues", {"figure: fig4"}, {"index", "lambda"}, vrows);

  const double dev = ortho_deviation(op.grid, pairs.vectors);
  ctx.check("orthonormal", dev <= 1e-8, dev);
  double rmax = 0.0;
  for (int j = 0; j < m; ++j) {
    const Field v = pairs.vectors.col(j);
    const Field r = op.apply(v) - pairs.values[j] * v;
    rmax = std::max(rmax, norm_w(op.grid, r));
  }
  ctx.check("eigen_residual", rmax <= 1e-8, rmax);
  ctx.rep.metrics["eigenvalues"] = std::vector<double>(
      pairs.values.data(), pairs.values.data() + pairs.values.size());
  return ctx.rep;
}

BcpwSet build_set(const ExperimentConfig& cfg, const HamiltonianOp& op) {
  return build_bcpw_set(op.grid, cfg.cpw_levels, cfg.cpw_mu, cfg.cpw_w,
                        cpw_options(cfg));
}

RunReport run_bcpw_gallery(const ExperimentConfig& cfg) {
  Ctx ctx(cfg);
  const HamiltonianOp op = make_operator(cfg);
  const BcpwSet set = build_set(cfg, op);

  if (cfg.format == "csv") {
    write_bcpw_csv(ctx.path("bcpw_modes.csv"), set,
                   {"figure: fig6", "compressed plane wave ladder"});
    ctx.add_file("bcpw_modes.csv");
  } else {
    std::vector<std::string> cols = {"x"};
    for (int l = 1; l <= set.levels(); ++l)
      cols.push_back("psi_" + std::to_string(l));
    std::vector<std::vector<double>> rows(set.grid.n);
    for (int i = 0; i < set.grid.n; ++i) {
      rows[i].push_back(set.grid.node(i));
      for (int l = 0; l < set.levels(); ++l)
        rows[i].push_back(set.modes[l][i]);
    }
    emit_table(ctx, "bcpw_modes",
               {"figure: fig6", "compressed plane wave ladder"}, cols, rows);
  }
  write_bcpw_sidecar(ctx.path("bcpw_meta.json"), set);
  ctx.add_file("bcpw_meta.json");

  const double res = max_shift_residual(set);
  ctx.check("shift_orthonormal", res <= 1e-6, res);
  ordered_json lv = ordered_json::array();
  for (int l = 1; l <= set.levels(); ++l) {
    ordered_json e;
    e["level"] = l;
    e["support_start"] = set.support[l - 1].first;
    e["support_length"] = set.support[l - 1].second;
    lv.push_back(e);
  }
  ctx.rep.metrics["levels"] = lv;
  ctx.rep.metrics["max_shift_residual"] = res;
  return ctx.rep;
}

/// Contiguous symmetric band [-m*, m*] where the cumulative profile sits in
/// [0.9, 1.1]; returns coverage stats used by the plateau checks.
struct PlateauStats {
  double inside_weight = 0.0;
  double outside_max = 0.0;
  int half_width = -1;
  bool found = false;
};

PlateauStats plateau_stats(const PeriodicGrid& g,
                           const Eigen::VectorXd& profile) {
  PlateauStats st;
  const int n = g.n;
  const double total = profile.sum();
  int best = -1;
  for (int m = 0; m <= n / 2; ++m) {
    const bool lo_ok = profile[m] >= 0.9 && profile[m] <= 1.1;
    const bool hi_ok =
        m == 0 || (profile[n - m] >= 0.9 && profile[n - m] <= 1.1);
    if (lo_ok && hi_ok)
      best = m;
    else
      break;
  }
  if (best < 0) return st;
  double inside = profile[0];
  for (int m = 1; m <= best; ++m) inside += profile[m] + profile[n - m];
  double outmax = 0.0;
  for (int m = best + 1; m <= n / 2; ++m) {
    outmax = std::max(outmax, profile[m]);
    if (m < n - m) outmax = std::max(outmax, profile[n - m]);
  }
  st.found = true;
  st.half_width = best;
  st.inside_weight = inside / (total > 0 ? total : 1.0);
  st.outside_max = outmax;
  return st;
}

RunReport run_spectral_weights(const ExperimentConfig& cfg) {
  Ctx ctx(cfg);
  const HamiltonianOp op = make_operator(cfg);
  const BcpwSet set = build_set(cfg, op);
  const PeriodicGrid& g = set.grid;

  std::vector<std::string> cols = {"G"};
  for (int l = 1; l <= set.levels(); ++l)
    cols.push_back("weight_" + std::to_string(l));
  cols.push_back("cumulative");

  std::vector<Eigen::VectorXd> weights;
  for (int l = 1; l <= set.levels(); ++l)
    weights.push_back(spectral_weight(set, l));
  const Eigen::VectorXd profile = cumulative_band_profile(set);

  // Rows ordered by signed frequency so the step shape plots directly.
  std::vector<std::vector<double>> rows;
  for (int k = -(g.n / 2 - 1); k <= g.n / 2; ++k) {
    const int m = (k + g.n) % g.n;
    std::vector<double> row = {2.0 * M_PI * k / g.L};
    for (const auto& wv : weights) row.push_back(wv[m]);
    row.push_back(profile[m]);
    rows.push_back(row);
  }
  emit_table(ctx, "spectral_weights",
             {"figure: fig7", "per level spectral weight and cumulative band profile"},
             cols, rows);

  const PlateauStats st = plateau_stats(g, profile);
  ctx.check("plateau_found", st.found, static_cast<double>(st.half_width));
  ctx.check("plateau_coverage", st.found && st.inside_weight >= 0.8,
            st.inside_weight);
  ctx.check("plateau_outside", st.found && st.outside_max <= 0.1,
            st.outside_max);

  double prev = -1.0;
  bool increasing = true;
  std::vector<double> means;
  for (int l = 1; l <= set.levels(); ++l) {
    double num = 0.0, den = 0.0;
    for (int m = 0; m < g.n; ++m) {
      const double absg = std::abs(freq(g, m));
      num += absg * weights[l - 1][m];
      den += weights[l - 1][m];
    }
    const double mean = num / den;
    means.push_back(mean);
    if (mean <= prev) increasing = false;
    prev = mean;
  }
  ctx.check("mean_frequency_increasing", increasing, means.back());
  ctx.rep.metrics["mean_abs_G"] = means;
  ctx.rep.metrics["plateau_half_width"] = st.half_width;
  ctx.rep.metrics["plateau_coverage"] = st.inside_weight;
  ctx.rep.metrics["plateau_outside_max"] = st.outside_max;
  return ctx.rep;
}

RunReport run_cpw_eigs(const ExperimentConfig& cfg) {
  Ctx ctx(cfg);
  const HamiltonianOp op = make_operator(cfg);
  const BcpwSet set = build_set(cfg, op);
  const Eigen::MatrixXd family = set.family_matrix();
  const int total = static_cast<int>(family.cols());
  const int m = std::min(cfg.m_ref > 0 ? cfg.m_ref : total, total);

  const EigenPairs ref = reference_eigenpairs(op, m);
  const Eigen::VectorXd sigma = projected_spectrum(family, op);

  std::vector<std::vector<double>> rows;
  for (int i = 0; i < m; ++i)
    rows.push_back({static_cast<double>(i + 1), ref.values[i], sigma[i]});
  emit_table(ctx, "cpw_eigs",
             {"figure: fig11",
              "reference spectrum vs projection onto the full shift family"},
             {"index", "lambda_ref", "sigma_cpw"}, rows);

  // Error over a fixed head of the spectrum decreases with ladder depth
  // (nested trial subspaces); error over all covered eigenvalues is the
  // per-depth figure curve.
  const int head = std::min(m, set.N0);
  std::vector<std::vector<double>> erows;
  std::vector<double> errors;
  for (int lv = 1; lv <= set.levels(); ++lv) {
    BcpwSet part = set;
    part.modes.resize(lv);
    part.fourier.resize(lv);
    part.support.resize(lv);
    const Eigen::MatrixXd fam = part.family_matrix();
    const Eigen::VectorXd sig = projected_spectrum(fam, op);
    const int covered = std::min<int>(m, static_cast<int>(fam.cols()));
    const double e_head = relative_eigenvalue_error(
        sig, ref.values, std::min(head, covered));
    const double e_all =
        relative_eigenvalue_error(sig, ref.values, covered);
    errors.push_back(e_head);
    erows.push_back({static_cast<double>(lv), e_head, e_all});
  }
  emit_table(ctx, "cpw_eigs_error",
             {"figure: fig11", "relative spectrum error vs ladder depth"},
             {"levels", "rel_error_head", "rel_error_covered"}, erows);

  double min_gap = 0.0;
  for (int i = 0; i < m; ++i)
    min_gap = std::min(min_gap, sigma[i] - ref.values[i]);
  ctx.check("variational_bound", min_gap >= -1e-8, min_gap);
  bool decreasing = true;
  for (size_t i = 1; i < errors.size(); ++i)
    if (errors[i] > errors[i - 1]) decreasing = false;
  ctx.check("error_decreasing_in_levels", decreasing, errors.back());
  const double head_err =
      relative_eigenvalue_error(sigma, ref.values, head);
  ctx.check("low_spectrum_accurate", head_err <= 0.05, head_err);
  ctx.rep.metrics["rel_error_by_levels"] = errors;
  ctx.rep.metrics["low_spectrum_error"] = head_err;
  return ctx.rep;
}

RunReport run_transform_demo(const ExperimentConfig& cfg) {
  Ctx ctx(cfg);
  const HamiltonianOp op = make_operator(cfg);
  const BcpwSet set = build_set(cfg, op);
  const Eigen::MatrixXd states = reference_states(op, cfg.states);

  const int decay_len = 80;
  std::vector<std::string> dcols = {"rank"};
  std::vector<std::vector<double>> drows(decay_len);
  for (int i = 0; i < decay_len; ++i)
    drows[i].push_back(static_cast<double>(i + 1));

  double rt_max = 0.0, recon_max = 0.0, parseval_max = 0.0;
  for (int s = 0; s < cfg.states; ++s) {
    const Field f = states.col(s);
    const CpwCoeffs c = cpw_forward(f, set);
    const Field rec = cpw_inverse(c, set);
    const std::string tag = std::to_string(s + 1);

    std::vector<std::vector<double>> rrows(set.grid.n);
    for (int i = 0; i < set.grid.n; ++i)
      rrows[i] = {set.grid.node(i), f[i], rec[i]};
    emit_table(ctx, "state" + tag + "_recon",
               {"figure: fig12", "eigenstate " + tag +
                                     " vs synthesis from its expansion"},
               {"x", "state", "cpw_synthesis"}, rrows);

    if (cfg.format == "csv") {
      write_coeffs_csv(ctx.path("state" + tag + "_coeffs.csv"), c,
                       {"figure: fig10", "expansion of eigenstate " + tag});
      ctx.add_file("state" + tag + "_coeffs.csv");
    } else {
      std::vector<std::vector<double>> crows;
      for (int l = 0; l < c.n_max; ++l)
        for (int j = 0; j < c.N0; ++j)
          crows.push_back(
              {static_cast<double>(l + 1), static_cast<double>(j), c.values(l, j)});
      emit_table(ctx, "state" + tag + "_coeffs",
                 {"figure: fig10", "expansion of eigenstate " + tag},
                 {"level", "shift", "value"}, crows);
    }

    const std::vector<double> cm = cpw_magnitudes(c);
    const std::vector<double> fm = fourier_magnitudes(set.grid, f);
    dcols.push_back("cpw_state" + tag);
    dcols.push_back("fourier_state" + tag);
    for (int i = 0; i < decay_len; ++i) {
      drows[i].push_back(i < static_cast<int>(cm.size()) ? cm[i] : 0.0);
      drows[i].push_back(i < static_cast<int>(fm.size()) ? fm[i] : 0.0);
    }

    const CpwCoeffs c2 = cpw_forward(rec, set);
    rt_max = std::max(rt_max, (c2.values - c.values).cwiseAbs().maxCoeff());
    recon_max = std::max(recon_max, norm_w(set.grid, f - rec));
    const double bessel =
        c.values.squaredNorm() - dot_w(set.grid, f, f);
    parseval_max = std::max(parseval_max, bessel);
  }
  emit_table(ctx, "coeff_decay",
             {"figure: fig10",
              "largest magnitude coefficients, shift family vs Fourier"},
             dcols, drows);

  ctx.check("coefficient_round_trip", rt_max <= 1e-10, rt_max);
  ctx.check("bessel_bound", parseval_max <= 1e-8, parseval_max);
  ctx.check("synthesis_error", recon_max <= 0.05, recon_max);
  ctx.rep.metrics["round_trip_max"] = rt_max;
  ctx.rep.metrics["synthesis_error_max"] = recon_max;
  return ctx.rep;
}

RunReport run_windowed_demo(const ExperimentConfig& cfg) {
  Ctx ctx(cfg);
  const HamiltonianOp op = make_operator(cfg);
  const BcpwSet set = build_set(cfg, op);
  const PeriodicGrid& g = set.grid;
  const Eigen::MatrixXd states = reference_states(op, cfg.states);

  Window win;
  win.start = cfg.window_start;
  win.length = cfg.window_length > 0 ? cfg.window_length : g.n / 2;
  if (cfg.window_length <= 0) win.start = g.n / 4;

  std::vector<std::string> cols = {"x"};
  std::vector<std::vector<double>> rows(win.length);
  for (int i = 0; i < win.length; ++i)
    rows[i].push_back(g.node((win.start + i) % g.n));

  double inv_dev = 0.0, fwd_dev = 0.0;
  for (int s = 0; s < cfg.states; ++s) {
    const Field f = states.col(s);
    const CpwCoeffs c = cpw_forward(f, set);
    const Field full = cpw_inverse(c, set);
    const Field wi = windowed_inverse(c, set, win);
    for (int i = 0; i < win.length; ++i) {
      const double ref = full[(win.start + i) % g.n];
      inv_dev = std::max(inv_dev, std::abs(wi[i] - ref));
    }
    cols.push_back("restricted_" + std::to_string(s + 1));
    cols.push_back("windowed_" + std::to_string(s + 1));
    for (int i = 0; i < win.length; ++i) {
      rows[i].push_back(full[(win.start + i) % g.n]);
      rows[i].push_back(wi[i]);
    }

    // Zero-extended oracle for the windowed analysis.
    Field f_zero = Field::Zero(g.n);
    Field f_win(win.length);
    for (int i = 0; i < win.length; ++i) {
      const int idx = (win.start + i) % g.n;
      f_win[i] = f[idx];
      f_zero[idx] = f[idx];
    }
    const CpwCoeffs full_fwd = cpw_forward(f_zero, set);
    const PartialCoeffs pc = windowed_forward(f_win, set, win);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(c.n_max, c.N0);
    for (const auto& [lv, j] : pc.members)
      dense(lv - 1, j) = pc.coeffs.values(lv - 1, j);
    fwd_dev = std::max(
        fwd_dev, (dense - full_fwd.values).cwiseAbs().maxCoeff());
  }
  emit_table(ctx, "windowed_recon",
             {"figure: fig13",
              "windowed synthesis vs restriction of the full synthesis"},
             cols, rows);

  ctx.check("windowed_inverse_matches", inv_dev <= 1e-8, inv_dev);
  ctx.check("windowed_forward_matches", fwd_dev <= 1e-10, fwd_dev);
  ctx.rep.metrics["window_start"] = win.start;
  ctx.rep.metrics["window_length"] = win.length;
  ctx.rep.metrics["inverse_deviation"] = inv_dev;
  ctx.rep.metrics["forward_deviation"] = fwd_dev;
  return ctx.rep;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config plumbing
// ---------------------------------------------------------------------------

ExperimentConfig parse_config(const json& doc) {
  require(doc.is_object(), Err::ConfigInvalid, "config must be a JSON object");
  check_keys(doc, "config", {"version", "experiment", "grid", "potential",
                             "solver", "cpw", "transform", "output"});
  require(doc.contains("version"), Err::ConfigInvalid,
          "config must carry a version field");
  require(doc["version"].is_string() &&
              doc["version"].get<std::string>() == kVersion,
          Err::ConfigInvalid,
          std::string("unsupported config version, expected ") + kVersion);

  ExperimentConfig cfg;
  require(doc.contains("experiment") && doc["experiment"].is_string(),
          Err::ConfigInvalid, "config must name an experiment");
  cfg.experiment = doc["experiment"].get<std::string>();
  const auto known = known_experiments();
  require(std::find(known.begin(), known.end(), cfg.experiment) != known.end(),
          Err::UnknownExperiment, "unknown experiment '" + cfg.experiment + "'");

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    check_keys(g, "grid", {"L", "n"});
    cfg.L = get_num(g, "L", cfg.L);
    cfg.n = get_int(g, "n", cfg.n);
    require(cfg.L > 0, Err::ConfigInvalid, "grid.L must be positive");
    require(cfg.n >= 4, Err::ConfigInvalid, "grid.n must be at least 4");
  }
  if (doc.contains("potential")) {
    const json& p = doc["potential"];
    check_keys(p, "potential", {"kind", "v0", "well_width", "wells",
                                "impurity_site", "impurity_factor"});
    cfg.potential = get_str(p, "kind", cfg.potential);
    require(cfg.potential == "free" || cfg.potential == "kronig_penney" ||
                cfg.potential == "impurity_kronig_penney",
            Err::ConfigInvalid,
            one_of_msg("potential.kind",
                       "free, kronig_penney, impurity_kronig_penney"));
    cfg.v0 = get_num(p, "v0", cfg.v0);
    cfg.well_width = get_num(p, "well_width", cfg.well_width);
    cfg.wells = get_int(p, "wells", cfg.wells);
    cfg.impurity_site = get_int(p, "impurity_site", cfg.impurity_site);
    cfg.impurity_factor = get_num(p, "impurity_factor", cfg.impurity_factor);
    require(cfg.v0 > 0, Err::ConfigInvalid, "potential.v0 must be positive");
    require(cfg.well_width > 0, Err::ConfigInvalid,
            "potential.well_width must be positive");
  }
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    check_keys(s, "solver",
               {"mu", "n_list", "n_modes", "m_ref", "seed", "tol_split",
                "tol_obj", "max_iter", "band_p", "mu_units", "stencil"});
    if (s.contains("mu")) cfg.mu = get_num_list(s["mu"], "solver.mu");
    require(!cfg.mu.empty(), Err::ConfigInvalid, "solver.mu must be nonempty");
    for (double m : cfg.mu)
      require(m > 0, Err::ConfigInvalid, "solver.mu values must be positive");
    if (s.contains("n_list"))
      cfg.n_list = get_int_list(s["n_list"], "solver.n_list");
    for (int nv : cfg.n_list)
      require(nv >= 1, Err::ConfigInvalid, "solver.n_list must be positive");
    cfg.n_modes = get_int(s, "n_modes", cfg.n_modes);
    cfg.m_ref = get_int(s, "m_ref", cfg.m_ref);
    require(cfg.n_modes >= 1, Err::ConfigInvalid,
            "solver.n_modes must be at least 1");
    require(cfg.m_ref >= 0, Err::ConfigInvalid,
            "solver.m_ref must be nonnegative");
    if (s.contains("seed")) {
      require(s["seed"].is_number_unsigned(), Err::ConfigInvalid,
              "solver.seed must be a nonnegative integer");
      cfg.seed = s["seed"].get<std::uint64_t>();
    }
    cfg.tol_split = get_num(s, "tol_split", cfg.tol_split);
    cfg.tol_obj = get_num(s, "tol_obj", cfg.tol_obj);
    cfg.max_iter = get_int(s, "max_iter", cfg.max_iter);
    cfg.band_p = get_int(s, "band_p", cfg.band_p);
    require(cfg.tol_split > 0 && cfg.tol_obj > 0, Err::ConfigInvalid,
            "solver tolerances must be positive");
    require(cfg.max_iter >= 1, Err::ConfigInvalid,
            "solver.max_iter must be at least 1");
    require(cfg.band_p >= 0, Err::ConfigInvalid,
            "solver.band_p must be nonnegative");
    cfg.mu_units = get_str(s, "mu_units", cfg.mu_units);
    require(cfg.mu_units == "weighted" || cfg.mu_units == "figure",
            Err::ConfigInvalid, one_of_msg("solver.mu_units", "weighted, figure"));
    cfg.stencil = get_str(s, "stencil", cfg.stencil);
    require(cfg.stencil == "fd" || cfg.stencil == "spectral",
            Err::ConfigInvalid, one_of_msg("solver.stencil", "fd, spectral"));
  }
  if (doc.contains("cpw")) {
    const json& c = doc["cpw"];
    check_keys(c, "cpw", {"w", "levels", "mu"});
    cfg.cpw_w = get_num(c, "w", cfg.cpw_w);
    cfg.cpw_levels = get_int(c, "levels", cfg.cpw_levels);
    cfg.cpw_mu = get_num(c, "mu", cfg.cpw_mu);
    require(cfg.cpw_w > 0, Err::ConfigInvalid, "cpw.w must be positive");
    require(cfg.cpw_levels >= 1, Err::ConfigInvalid,
            "cpw.levels must be at least 1");
    require(cfg.cpw_mu > 0, Err::ConfigInvalid, "cpw.mu must be positive");
  }
  if (doc.contains("transform")) {
    const json& t = doc["transform"];
    check_keys(t, "transform",
               {"window_start", "window_length", "topk", "states"});
    cfg.window_start = get_int(t, "window_start", cfg.window_start);
    cfg.window_length = get_int(t, "window_length", cfg.window_length);
    if (t.contains("topk")) cfg.topk = get_int_list(t["topk"], "transform.topk");
    require(!cfg.topk.empty(), Err::ConfigInvalid,
            "transform.topk must be nonempty");
    for (int k : cfg.topk)
      require(k >= 1, Err::ConfigInvalid, "transform.topk must be positive");
    cfg.states = get_int(t, "states", cfg.states);
    require(cfg.states >= 1, Err::ConfigInvalid,
            "transform.states must be at least 1");
    require(cfg.window_start >= 0, Err::ConfigInvalid,
            "transform.window_start must be nonnegative");
    require(cfg.window_length >= 0, Err::ConfigInvalid,
            "transform.window_length must be nonnegative");
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    check_keys(o, "output", {"dir", "format"});
    cfg.out_dir = get_str(o, "dir", cfg.out_dir);
    cfg.format = get_str(o, "format", cfg.format);
    require(cfg.format == "csv" || cfg.format == "json", Err::ConfigInvalid,
            one_of_msg("output.format", "csv, json"));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), Err::ConfigInvalid, "cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    fail(Err::ConfigInvalid, std::string("config parse error: ") + e.what());
  }
  return parse_config(doc);
}

ordered_json config_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["version"] = kVersion;
  j["experiment"] = cfg.experiment;
  j["grid"] = {{"L", cfg.L}, {"n", cfg.n}};
  j["potential"] = {{"kind", cfg.potential},
                    {"v0", cfg.v0},
                    {"well_width", cfg.well_width},
                    {"wells", cfg.wells},
                    {"impurity_site", cfg.impurity_site},
                    {"impurity_factor", cfg.impurity_factor}};
  ordered_json s;
  s["mu"] = cfg.mu;
  s["n_list"] = cfg.n_list;
  s["n_modes"] = cfg.n_modes;
  s["m_ref"] = cfg.m_ref;
  if (cfg.seed) s["seed"] = *cfg.seed;
  s["tol_split"] = cfg.tol_split;
  s["tol_obj"] = cfg.tol_obj;
  s["max_iter"] = cfg.max_iter;
  s["band_p"] = cfg.band_p;
  s["mu_units"] = cfg.mu_units;
  s["stencil"] = cfg.stencil;
  j["solver"] = s;
  j["cpw"] = {{"w", cfg.cpw_w}, {"levels", cfg.cpw_levels}, {"mu", cfg.cpw_mu}};
  j["transform"] = {{"window_start", cfg.window_start},
                    {"window_length", cfg.window_length},
                    {"topk", cfg.topk},
                    {"states", cfg.states}};
  j["output"] = {{"dir", cfg.out_dir}, {"format", cfg.format}};
  return j;
}

std::vector<std::string> known_experiments() {
  return {"cm-gallery",   "eigenfunctions",     "bcpw-gallery",
          "spectral-weights", "completeness",   "energy-convergence",
          "table1",       "cpw-eigs",           "transform-demo",
          "windowed-demo"};
}

std::vector<std::string> known_figures() {
  return {"fig3",  "fig4",  "fig6",  "fig7",  "fig8",   "fig9",
          "fig10", "fig11", "fig12", "fig13", "table1"};
}

ExperimentConfig stock_config(const std::string& figure_id) {
  ExperimentConfig cfg;
  cfg.seed = 20250501;
  if (figure_id == "fig3") {
    cfg.experiment = "cm-gallery";
    cfg.L = 50;
    cfg.n = 512;
    cfg.n_modes = 5;
    cfg.mu = {30, 50, 500};
    cfg.mu_units = "figure";
  } else if (figure_id == "fig4") {
    cfg.experiment = "eigenfunctions";
    cfg.L = 50;
    cfg.n = 512;
    cfg.potential = "kronig_penney";
    cfg.n_modes = 5;
    cfg.m_ref = 5;
  } else if (figure_id == "fig6" || figure_id == "fig7") {
    cfg.experiment = figure_id == "fig6" ? "bcpw-gallery" : "spectral-weights";
    cfg.L = 100;
    cfg.n = 512;
    cfg.cpw_w = 5;
    cfg.cpw_levels = 6;
    cfg.cpw_mu = 5;
  } else if (figure_id == "fig8") {
    cfg.experiment = "completeness";
    cfg.L = 50;
    cfg.n = 128;
    cfg.mu = {10};
    cfg.n_list = {50, 60, 128};
    cfg.n_modes = 50;
    cfg.m_ref = 50;
  } else if (figure_id == "fig9") {
    cfg.experiment = "completeness";
    cfg.L = 50;
    cfg.n = 128;
    cfg.mu = {10, 30, 100};
    cfg.n_modes = 50;
    cfg.m_ref = 50;
  } else if (figure_id == "fig10" || figure_id == "fig12") {
    cfg.experiment = "transform-demo";
    cfg.L = 100;
    cfg.n = 512;
    cfg.potential = "impurity_kronig_penney";
    cfg.stencil = "spectral";
    cfg.states = 4;
  } else if (figure_id == "fig11") {
    cfg.experiment = "cpw-eigs";
    cfg.L = 100;
    cfg.n = 640;
    cfg.potential = "impurity_kronig_penney";
    cfg.stencil = "spectral";
    cfg.m_ref = 120;
  } else if (figure_id == "fig13") {
    cfg.experiment = "windowed-demo";
    cfg.L = 100;
    cfg.n = 512;
    cfg.potential = "impurity_kronig_penney";
    cfg.stencil = "spectral";
    cfg.states = 4;
    cfg.window_start = 179;
    cfg.window_length = 154;
  } else if (figure_id == "table1") {
    cfg.experiment = "table1";
    cfg.L = 100;
    cfg.n = 512;
    cfg.potential = "impurity_kronig_penney";
    cfg.stencil = "spectral";
    cfg.states = 4;
  } else if (figure_id == "mu-convergence") {
    cfg.experiment = "energy-convergence";
    cfg.L = 50;
    cfg.n = 256;
    cfg.n_modes = 5;
    cfg.mu = {16, 32, 64, 128, 160};
  } else {
    fail(Err::UnknownExperiment, "unknown figure id '" + figure_id + "'");
  }
  return cfg;
}

HamiltonianOp make_operator(const ExperimentConfig& cfg) {
  const PeriodicGrid grid = build_grid(cfg.L, cfg.n);
  PotentialSpec spec;
  if (cfg.potential == "free") {
    spec = PotentialSpec::free();
  } else {
    const int nel =
        cfg.wells > 0 ? cfg.wells : static_cast<int>(std::lround(cfg.L / 10.0));
    require(nel >= 1, Err::ConfigInvalid,
            "domain too short for a well lattice");
    if (cfg.potential == "kronig_penney")
      spec = PotentialSpec::kronig_penney(nel, cfg.v0, cfg.well_width);
    else
      spec = PotentialSpec::impurity_kronig_penney(
          nel, cfg.impurity_factor, cfg.impurity_site, cfg.v0, cfg.well_width);
  }
  const KineticStencil st = cfg.stencil == "spectral"
                                ? KineticStencil::Spectral
                                : KineticStencil::SecondOrderFD;
  return assemble_hamiltonian(grid, eval_potential(spec, grid), st);
}

double mapped_mu(const ExperimentConfig& cfg, double mu_value) {
  if (cfg.mu_units == "figure")
    return std::sqrt(cfg.L / cfg.n) * mu_value;
  return mu_value;
}

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

RunReport completeness_study(const ExperimentConfig& cfg) {
  Ctx ctx(cfg);
  const HamiltonianOp op = make_operator(cfg);
  const SolveOptions opts = solver_options(cfg);
  const int m = cfg.m_ref > 0 ? cfg.m_ref : cfg.n_modes;
  const bool n_sweep = !cfg.n_list.empty();
  const std::vector<int> n_values =
      n_sweep ? cfg.n_list : std::vector<int>(cfg.mu.size(), cfg.n_modes);

  for (int nv : n_values) {
    require(m <= nv, Err::ConfigInvalid,
            "m_ref must not exceed the mode count");
    require(nv <= op.grid.n, Err::ConfigInvalid,
            "mode count must not exceed the node count");
  }

  const EigenPairs ref = reference_eigenpairs(op, m);

  std::vector<std::future<double>> jobs;
  const size_t points = n_sweep ? cfg.n_list.size() : cfg.mu.size();
  for (size_t i = 0; i < points; ++i) {
    const int nv = n_values[i];
    const double mu = mapped_mu(cfg, n_sweep ? cfg.mu.front() : cfg.mu[i]);
    jobs.push_back(std::async(std::launch::async, [&, nv, mu] {
      const SolveResult res = solve_cm(op, nv, mu, opts);
      const Eigen::VectorXd sigma = projected_spectrum(res.modes.modes, op);
      return relative_eigenvalue_error(sigma, ref.values, m);
    }));
  }

  std::vector<double> errors(points);
  for (size_t i = 0; i < points; ++i) errors[i] = jobs[i].get();

  // Control: projecting onto exact eigenvectors reproduces the spectrum.
  const double control = relative_eigenvalue_error(
      projected_spectrum(ref.vectors, op), ref.values, m);

  std::vector<std::vector<double>> rows;
  if (n_sweep) {
    for (size_t i = 0; i < points; ++i)
      rows.push_back({static_cast<double>(cfg.n_list[i]), errors[i]});
    emit_table(ctx, "completeness_N",
               {"figure: fig8",
                "projected spectrum error vs mode count, mu=" +
                    format_double(cfg.mu.front())},
               {"N", "rel_error"}, rows);
    bool dec = true;
    for (size_t i = 1; i < points; ++i)
      if (errors[i] >= errors[i - 1]) dec = false;
    ctx.check("error_strictly_decreasing_in_N", dec, errors.back());
  } else {
    for (size_t i = 0; i < points; ++i)
      rows.push_back({cfg.mu[i], errors[i]});
    emit_table(ctx, "completeness_mu",
               {"figure: fig9",
                "projected spectrum error vs mu, N=" +
                    std::to_string(cfg.n_modes)},
               {"mu", "rel_error"}, rows);
    bool dec = true;
    for (size_t i = 1; i < points; ++i)
      if (errors[i] >= errors[i - 1]) dec = false;
    ctx.check("error_decreasing_in_mu", dec, errors.back());
  }
  ctx.check("control_error", control <= 1e-10, control);
  ctx.rep.metrics["errors"] = errors;
  ctx.rep.metrics["control_error"] = control;
  return ctx.rep;
}

RunReport energy_convergence_study(const ExperimentConfig& cfg) {
  Ctx ctx(cfg);
  require(cfg.mu.size() >= 4, Err::ConfigInvalid,
          "energy convergence needs at least 4 mu points");
  const double mu_min = *std::min_element(cfg.mu.begin(), cfg.mu.end());
  const double mu_max = *std::max_element(cfg.mu.begin(), cfg.mu.end());
  require(mu_max >= 10.0 * mu_min * (1.0 - 1e-12), Err::ConfigInvalid,
          "energy convergence needs a mu sweep spanning a decade");

  const HamiltonianOp op = make_operator(cfg);
  const SolveOptions opts = solver_options(cfg);
  const int n_modes = cfg.n_modes;
  const double e0 = reference_eigenpairs(op, n_modes).values.sum();

  std::vector<std::future<double>> jobs;
  for (double mu_cfg : cfg.mu) {
    const double mu = mapped_mu(cfg, mu_cfg);
    jobs.push_back(std::async(std::launch::async, [&, mu] {
      const SolveResult res = solve_cm(op, n_modes, mu, opts);
      return projected_hamiltonian(res.modes.modes, op).trace();
    }));
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> lx, ly, excluded;
  const double floor = 1e-11 * std::max(1.0, std::abs(e0));
  for (size_t i = 0; i < jobs.size(); ++i) {
    const double total = jobs[i].get();
    const double gap = total - e0;
    rows.push_back({cfg.mu[i], total, gap});
    if (gap > floor) {
      lx.push_back(std::log(cfg.mu[i]));
      ly.push_back(std::log(gap));
    } else {
      excluded.push_back(cfg.mu[i]);
    }
  }
  emit_table(ctx, "energy_gap",
             {"figure: none (total energy convergence rate study)",
              "reference total E0=" + format_double(e0)},
             {"mu", "total_energy", "gap"}, rows);

  require(lx.size() >= 2, Err::NonPositiveGap,
          "too few positive energy gaps to fit a rate");
  const double slope = fit_slope(lx, ly);
  double loo_max = 0.0;
  if (lx.size() > 2) {
    for (size_t skip = 0; skip < lx.size(); ++skip) {
      std::vector<double> fx, fy;
      for (size_t i = 0; i < lx.size(); ++i) {
        if (i == skip) continue;
        fx.push_back(lx[i]);
        fy.push_back(ly[i]);
      }
      loo_max = std::max(loo_max, std::abs(fit_slope(fx, fy) - slope));
    }
  }

  ctx.check("gaps_positive", excluded.empty(),
            static_cast<double>(excluded.size()));
  ctx.check("slope_in_band", std::abs(slope + 2.0) <= 0.3, slope);
  ctx.check("leave_one_out_stable", loo_max < 0.2, loo_max);
  ctx.rep.metrics["e0"] = e0;
  ctx.rep.metrics["slope"] = slope;
  ctx.rep.metrics["leave_one_out_max"] = loo_max;
  ctx.rep.metrics["excluded_mu"] = excluded;
  return ctx.rep;
}

RunReport table1_study(const ExperimentConfig& cfg) {
  Ctx ctx(cfg);
  const HamiltonianOp op = make_operator(cfg);
  const BcpwSet set = build_set(cfg, op);
  const Eigen::MatrixXd states = reference_states(op, cfg.states);

  std::vector<std::string> cols = {"K"};
  for (int s = 1; s <= cfg.states; ++s)
    cols.push_back("cpw_state" + std::to_string(s));
  for (int s = 1; s <= cfg.states; ++s)
    cols.push_back("fourier_state" + std::to_string(s));

  Eigen::MatrixXd cpw_err(cfg.topk.size(), cfg.states);
  Eigen::MatrixXd fou_err(cfg.topk.size(), cfg.states);
  std::vector<std::vector<double>> rows;
  for (size_t ki = 0; ki < cfg.topk.size(); ++ki) {
    const int k = cfg.topk[ki];
    std::vector<double> row = {static_cast<double>(k)};
    for (int s = 0; s < cfg.states; ++s) {
      cpw_err(ki, s) = topk_error(states.col(s), set, TopkBasis::Cpw, k);
      row.push_back(cpw_err(ki, s));
    }
    for (int s = 0; s < cfg.states; ++s) {
      fou_err(ki, s) = topk_error(states.col(s), set, TopkBasis::Fourier, k);
      row.push_back(fou_err(ki, s));
    }
    rows.push_back(row);
  }
  emit_table(ctx, "table1",
             {"figure: table1",
              "sparse representation error, shift family vs Fourier"},
             cols, rows);

  bool dominates = true, monotone = true;
  for (size_t ki = 0; ki < cfg.topk.size(); ++ki)
    for (int s = 0; s < cfg.states; ++s) {
      if (cpw_err(ki, s) >= fou_err(ki, s)) dominates = false;
      if (ki > 0 && cpw_err(ki, s) > cpw_err(ki - 1, s) + 1e-14)
        monotone = false;
    }
  ctx.check("cpw_dominates", dominates,
            (fou_err - cpw_err).minCoeff());
  ctx.check("cpw_monotone_in_K", monotone, cpw_err.minCoeff());
  ctx.check("cpw_order", cpw_err.maxCoeff() <= 0.1, cpw_err.maxCoeff());
  ctx.check("fourier_order",
            fou_err.maxCoeff() <= 3.0 && fou_err.minCoeff() >= 1e-4,
            fou_err.maxCoeff());
  ctx.rep.metrics["cpw_error_max"] = cpw_err.maxCoeff();
  ctx.rep.metrics["cpw_error_min"] = cpw_err.minCoeff();
  ctx.rep.metrics["fourier_error_max"] = fou_err.maxCoeff();
  ctx.rep.metrics["fourier_error_min"] = fou_err.minCoeff();
  return ctx.rep;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  RunReport rep;
  try {
    if (cfg.experiment == "cm-gallery") rep = run_cm_gallery(cfg);
    else if (cfg.experiment == "eigenfunctions") rep = run_eigenfunctions(cfg);
    else if (cfg.experiment == "bcpw-gallery") rep = run_bcpw_gallery(cfg);
    else if (cfg.experiment == "spectral-weights") rep = run_spectral_weights(cfg);
    else if (cfg.experiment == "completeness") rep = completeness_study(cfg);
    else if (cfg.experiment == "energy-convergence")
      rep = energy_convergence_study(cfg);
    else if (cfg.experiment == "table1") rep = table1_study(cfg);
    else if (cfg.experiment == "cpw-eigs") rep = run_cpw_eigs(cfg);
    else if (cfg.experiment == "transform-demo") rep = run_transform_demo(cfg);
    else if (cfg.experiment == "windowed-demo") rep = run_windowed_demo(cfg);
    else fail(Err::UnknownExperiment, "unknown experiment '" + cfg.experiment + "'");
  } catch (const Error& e) {
    throw Error(e.code, cfg.experiment + ": " + e.what());
  }
  rep.all_passed = !rep.checks.empty();
  for (const CheckResult& c : rep.checks)
    if (!c.pass) rep.all_passed = false;
  rep.files.push_back("report.json");
  write_report((fs::path(cfg.out_dir) / "report.json").string(), rep);
  return rep;
}

void write_report(const std::string& path, const RunReport& rep) {
  ordered_json j;
  j["version"] = kVersion;
  j["experiment"] = rep.experiment;
  j["all_passed"] = rep.all_passed;
  ordered_json checks = ordered_json::array();
  for (const CheckResult& c : rep.checks) {
    ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["value"] = c.value;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["metrics"] = rep.metrics;
  j["files"] = rep.files;
  j["config"] = rep.config_echo;
  write_json_file(path, j);
}

}  // namespace cmpw
