#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "cmpw/cm_solver.hpp"
#include "cmpw/cpw_builder.hpp"
#include "cmpw/cpw_transform.hpp"
#include "cmpw/eigenref.hpp"
#include "cmpw/errors.hpp"
#include "cmpw/experiments.hpp"
#include "cmpw/io.hpp"

namespace py = pybind11;
using namespace cmpw;

namespace {

HamiltonianOp make_op(double L, int n, const std::string& kind, double v0,
                      double well_width, int wells, int impurity_site,
                      double impurity_factor, const std::string& stencil) {
  ExperimentConfig cfg;
  cfg.experiment = "cm-gallery";
  cfg.L = L;
  cfg.n = n;
  cfg.potential = kind;
  cfg.v0 = v0;
  cfg.well_width = well_width;
  cfg.wells = wells;
  cfg.impurity_site = impurity_site;
  cfg.impurity_factor = impurity_factor;
  cfg.stencil = stencil;
  require(kind == "free" || kind == "kronig_penney" ||
              kind == "impurity_kronig_penney",
          Err::ConfigInvalid, "unknown potential kind");
  require(stencil == "fd" || stencil == "spectral", Err::ConfigInvalid,
          "unknown stencil");
  return make_operator(cfg);
}

CpwCoeffs coeffs_from(const Eigen::MatrixXd& values, const BcpwSet& set) {
  CpwCoeffs c;
  c.values = values;
  c.L = set.grid.L;
  c.w = set.w;
  c.N0 = set.N0;
  c.n_max = static_cast<int>(values.rows());
  return c;
}

TopkBasis basis_from(const std::string& name) {
  if (name == "cpw") return TopkBasis::Cpw;
  if (name == "fourier") return TopkBasis::Fourier;
  fail(Err::ConfigInvalid, "basis must be 'cpw' or 'fourier'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "compressed modes and compressed plane waves";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "CmpwError");

  py::class_<PeriodicGrid>(m, "PeriodicGrid")
      .def_readonly("L", &PeriodicGrid::L)
      .def_readonly("n", &PeriodicGrid::n)
      .def_readonly("dx", &PeriodicGrid::dx)
      .def("node", &PeriodicGrid::node)
      .def("__repr__", [](const PeriodicGrid& g) {
        return "PeriodicGrid(L=" + format_double(g.L) +
               ", n=" + std::to_string(g.n) + ")";
      });

  py::class_<HamiltonianOp>(m, "HamiltonianOp")
      .def_readonly("grid", &HamiltonianOp::grid)
      .def("apply",
           [](const HamiltonianOp& op, const Field& u) { return op.apply(u); })
      .def("dense", &HamiltonianOp::dense)
      .def_property_readonly("potential", [](const HamiltonianOp& op) {
        return op.potential.values;
      });

  py::class_<ModeSet>(m, "ModeSet")
      .def_readonly("grid", &ModeSet::grid)
      .def_readonly("modes", &ModeSet::modes)
      .def_readonly("mu", &ModeSet::mu)
      .def_readonly("objective", &ModeSet::objective)
      .def("count", &ModeSet::count);

  py::class_<BcpwSet>(m, "BcpwSet")
      .def_readonly("grid", &BcpwSet::grid)
      .def_readonly("w", &BcpwSet::w)
      .def_readonly("N0", &BcpwSet::N0)
      .def_readonly("mu", &BcpwSet::mu)
      .def_readonly("support", &BcpwSet::support)
      .def("levels", &BcpwSet::levels)
      .def("member", &BcpwSet::member, py::arg("level"), py::arg("j"))
      .def("family_matrix", &BcpwSet::family_matrix)
      .def("mode",
           [](const BcpwSet& s, int level) {
             require(level >= 1 && level <= s.levels(), Err::LevelMissing,
                     "level out of range");
             return s.modes[level - 1];
           },
           py::arg("level"));

  m.def("grid", &build_grid, py::arg("L"), py::arg("n"));
  m.def("operator_", &make_op, py::arg("L"), py::arg("n"),
        py::arg("kind") = "free", py::arg("v0") = 1.0,
        py::arg("well_width") = 3.0, py::arg("wells") = 0,
        py::arg("impurity_site") = 0, py::arg("impurity_factor") = 2.0,
        py::arg("stencil") = "fd");

  m.def("shrink", &shrink, py::arg("u"), py::arg("delta"));
  m.def("orthonormal_projection", &orthonormal_projection, py::arg("grid"),
        py::arg("a"));
  m.def(
      "solve_cm",
      [](const HamiltonianOp& op, int n_modes, double mu, std::uint64_t seed,
         int max_iter, double tol_split, double tol_obj, int band_p) {
        SolveOptions o;
        o.seed = seed;
        o.max_iter = max_iter;
        o.tol_split = tol_split;
        o.tol_obj = tol_obj;
        o.band_p = band_p;
        SolveResult r = solve_cm(op, n_modes, mu, o);
        return py::make_tuple(r.modes, r.converged, r.state.iter);
      },
      py::arg("op"), py::arg("n_modes"), py::arg("mu"),
      py::arg("seed") = 20250501, py::arg("max_iter") = 20000,
      py::arg("tol_split") = 1e-6, py::arg("tol_obj") = 1e-8,
      py::arg("band_p") = 0);
  m.def("cm_objective", &cm_objective, py::arg("op"), py::arg("modes"),
        py::arg("mu"));
  m.def("closed_form_lambda", &closed_form_lambda, py::arg("mu"));
  m.def("closed_form_halfwidth", &closed_form_halfwidth, py::arg("mu"));
  m.def("sample_closed_form_psi1", &sample_closed_form_psi1, py::arg("mu"),
        py::arg("grid"));

  m.def("reference_eigenpairs",
        [](const HamiltonianOp& op, int m_count) {
          EigenPairs p = reference_eigenpairs(op, m_count);
          return py::make_tuple(p.values, p.vectors);
        },
        py::arg("op"), py::arg("m"));
  m.def("projected_spectrum", &projected_spectrum, py::arg("modes"),
        py::arg("op"));

  m.def(
      "build_bcpw_set",
      [](const PeriodicGrid& g, int levels, double mu, double w,
         double tol_split, int max_iter) {
        CpwOptions o;
        o.levels = levels;
        o.tol_split = tol_split;
        o.max_iter = max_iter;
        return build_bcpw_set(g, levels, mu, w, o);
      },
      py::arg("grid"), py::arg("levels"), py::arg("mu"), py::arg("w"),
      py::arg("tol_split") = 5e-12, py::arg("max_iter") = 60000);
  m.def("max_shift_residual", &max_shift_residual, py::arg("set"));
  m.def("spectral_weight", &spectral_weight, py::arg("set"), py::arg("level"));
  m.def("cumulative_band_profile", &cumulative_band_profile, py::arg("set"));

  m.def("cpw_forward",
        [](const Field& f, const BcpwSet& set) {
          return cpw_forward(f, set).values;
        },
        py::arg("f"), py::arg("basis"));
  m.def("cpw_inverse",
        [](const Eigen::MatrixXd& values, const BcpwSet& set) {
          return cpw_inverse(coeffs_from(values, set), set);
        },
        py::arg("values"), py::arg("basis"));
  m.def("windowed_inverse",
        [](const Eigen::MatrixXd& values, const BcpwSet& set, int start,
           int length) {
          return windowed_inverse(coeffs_from(values, set), set,
                                  Window{start, length});
        },
        py::arg("values"), py::arg("basis"), py::arg("start"),
        py::arg("length"));
  m.def("topk_error",
        [](const Field& f, const BcpwSet& set, const std::string& basis,
           int k) { return topk_error(f, set, basis_from(basis), k); },
        py::arg("f"), py::arg("basis_set"), py::arg("basis"), py::arg("k"));

  m.def("run_experiment_json",
        [](const std::string& config_text) {
          ExperimentConfig cfg;
          try {
            cfg = parse_config(nlohmann::json::parse(config_text));
          } catch (const nlohmann::json::exception& e) {
            fail(Err::ConfigInvalid,
                 std::string("config parse error: ") + e.what());
          }
          RunReport rep = run_experiment(cfg);
          nlohmann::ordered_json checks = nlohmann::ordered_json::array();
          for (const CheckResult& c : rep.checks)
            checks.push_back({{"name", c.name}, {"pass", c.pass},
                              {"value", c.value}});
          nlohmann::ordered_json j;
          j["experiment"] = rep.experiment;
          j["all_passed"] = rep.all_passed;
          j["checks"] = checks;
          j["files"] = rep.files;
          return j.dump();
        },
        py::arg("config_text"));
}
