#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rankreg/copula.hpp"
#include "rankreg/errors.hpp"
#include "rankreg/estimators.hpp"
#include "rankreg/inference.hpp"
#include "rankreg/ranks.hpp"
#include "rankreg/resampling.hpp"

namespace py = pybind11;
using namespace rankreg;

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Dataset make_dataset(const Eigen::VectorXd& y, std::optional<Eigen::VectorXd> x,
                     std::optional<Eigen::MatrixXd> w, std::optional<std::vector<std::string>> w_names,
                     std::optional<std::vector<std::string>> groups) {
  Dataset d;
  d.y = y;
  d.x = x.value_or(Eigen::VectorXd());
  d.w = w.value_or(Eigen::MatrixXd::Ones(y.size(), 1));
  if (w_names) {
    d.w_names = *w_names;
  } else if (!w) {
    d.w_names = {"intercept"};
  }
  if (groups) d.groups = GroupLabels::from_strings(*groups);
  return d;
}

py::dict triple_dict(const VarianceTriple& t) {
  py::dict d;
  d["sigma2"] = t.sigma2;
  d["sigma2_hom"] = t.sigma2_hom;
  d["sigma2_ew"] = t.sigma2_ew;
  d["rho"] = t.rho;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rankreg, m) {
  m.doc() = "Regressions on ranks with standard errors that account for rank estimation.";

  // Translators run newest first, so the base class is registered first.
  auto base = py::register_exception<Error>(m, "RankregError");
  py::register_exception<DegenerateInput>(m, "DegenerateInput", base.ptr());
  py::register_exception<SingularDesign>(m, "SingularDesign", base.ptr());
  py::register_exception<AssumptionViolation>(m, "AssumptionViolation", base.ptr());
  py::register_exception<CalibrationFailure>(m, "CalibrationFailure", base.ptr());
  py::register_exception<ResamplingFailure>(m, "ResamplingFailure", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidInput& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  m.def(
      "ecdf", [](const std::vector<double>& s, double t) { return ecdf(s, t); },
      py::arg("sample"), py::arg("t"));
  m.def(
      "ecdf_left", [](const std::vector<double>& s, double t) { return ecdf_left(s, t); },
      py::arg("sample"), py::arg("t"));
  m.def(
      "rank_transform",
      [](const std::vector<double>& s, double omega) { return rank_transform(s, TieRule(omega)); },
      py::arg("sample"), py::arg("omega") = 1.0);
  m.def(
      "spearman",
      [](const std::vector<double>& x, const std::vector<double>& y, double omega) {
        return spearman(x, y, TieRule(omega));
      },
      py::arg("x"), py::arg("y"), py::arg("omega") = 1.0);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("y"), py::arg("x") = py::none(),
           py::arg("w") = py::none(), py::arg("w_names") = py::none(),
           py::arg("groups") = py::none(),
           "W defaults to an intercept column; groups are string labels.")
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("p", &Dataset::p)
      .def_readonly("w_names", &Dataset::w_names);

  py::class_<FitResult>(m, "FitResult")
      .def_property_readonly("spec", [](const FitResult& f) { return std::string(to_string(f.spec)); })
      .def_property_readonly("omega", [](const FitResult& f) { return f.rule.omega(); })
      .def_property_readonly("coefficients", &FitResult::coefficients)
      .def_readonly("ranks_x", &FitResult::ranks_x)
      .def_readonly("ranks_y", &FitResult::ranks_y)
      .def_readonly("residuals", &FitResult::residuals)
      .def("coefficient_names", &FitResult::coefficient_names, py::arg("w_names"));

  m.def(
      "fit",
      [](const Dataset& d, const std::string& spec, double omega) {
        return fit(parse_spec(spec), d, TieRule(omega));
      },
      py::arg("data"), py::arg("spec") = "rank-rank", py::arg("omega") = 1.0);

  py::class_<InferenceReport>(m, "InferenceReport")
      .def_property_readonly("method", [](const InferenceReport& r) { return std::string(to_string(r.method)); })
      .def_readonly("alpha", &InferenceReport::alpha)
      .def_readonly("n", &InferenceReport::n)
      .def_readonly("names", &InferenceReport::names)
      .def_readonly("estimates", &InferenceReport::estimates)
      .def_readonly("variance", &InferenceReport::variance)
      .def_readonly("se", &InferenceReport::se)
      .def_property_readonly("ci", [](const InferenceReport& r) {
        std::vector<std::pair<double, double>> out;
        for (const auto& iv : r.ci) out.emplace_back(iv.lower, iv.upper);
        return out;
      });

  m.def(
      "plugin_inference",
      [](const FitResult& f, const Dataset& d, double alpha) { return plugin_inference(f, d, alpha).report; },
      py::arg("fit"), py::arg("data"), py::arg("alpha") = 0.05);
  m.def(
      "influence",
      [](const FitResult& f, const Dataset& d) { return plugin_inference(f, d).rows.psi; },
      py::arg("fit"), py::arg("data"), "Per-observation influence values, one column per coefficient.");
  m.def("naive_hom_variance", &naive_hom_variance, py::arg("fit"), py::arg("data"),
        py::arg("alpha") = 0.05);
  m.def("naive_ew_variance", &naive_ew_variance, py::arg("fit"), py::arg("data"),
        py::arg("alpha") = 0.05);
  m.def(
      "bootstrap",
      [](const Dataset& d, const std::string& spec, double omega, int reps, std::uint64_t seed,
         const std::string& ci_kind, double alpha, unsigned threads) {
        BootstrapPlan plan;
        plan.reps = reps;
        plan.seed = seed;
        plan.ci_kind = parse_ci_kind(ci_kind);
        plan.alpha = alpha;
        plan.threads = threads;
        const Spec s = parse_spec(spec);
        const TieRule rule(omega);
        BootstrapDraws draws = bootstrap_distribution(d, s, rule, plan);
        InferenceReport rep = bootstrap_report(draws, fit(s, d, rule).coefficients(), d.n(), plan);
        return py::make_tuple(draws.replicates, rep);
      },
      py::arg("data"), py::arg("spec") = "rank-rank", py::arg("omega") = 1.0,
      py::arg("reps") = 999, py::arg("seed") = 1, py::arg("ci_kind") = "percentile",
      py::arg("alpha") = 0.05, py::arg("threads") = 1,
      "Returns (replicates, report); ranks are recomputed on every resample.");
  m.def(
      "omega_sweep",
      [](const Dataset& d, const std::string& spec, const std::vector<double>& grid, double alpha) {
        const SweepTable t = omega_sweep(d, parse_spec(spec), grid, alpha);
        py::list rows;
        for (const auto& r : t.rows) {
          py::dict row;
          row["omega"] = r.omega;
          row["estimates"] = to_std(r.estimates);
          row["se"] = to_std(r.se);
          rows.append(row);
        }
        py::dict out;
        out["names"] = t.names;
        out["rows"] = rows;
        out["grid_average"] = to_std(t.grid_average);
        return out;
      },
      py::arg("data"), py::arg("spec"), py::arg("grid"), py::arg("alpha") = 0.05);
  m.def("mobility_theta", &mobility_theta, py::arg("beta_intercept"), py::arg("rho"), py::arg("p"));

  m.def(
      "sample_copula",
      [](const std::string& family, double param, Eigen::Index n, std::uint64_t seed) {
        const CopulaSample s = sample_copula({parse_family(family), param}, n, seed);
        return py::make_tuple(s.x, s.y);
      },
      py::arg("family"), py::arg("param"), py::arg("n"), py::arg("seed") = 1);
  m.def(
      "lemma2_closed_forms", [](double a) { return triple_dict(lemma2_closed_forms(a)); },
      py::arg("a"));
  m.def(
      "variance_triple_mc",
      [](const std::string& family, double param, Eigen::Index n_mc, std::uint64_t seed) {
        return triple_dict(variance_triple_mc({parse_family(family), param}, n_mc, seed));
      },
      py::arg("family"), py::arg("param"), py::arg("n_mc") = 200000, py::arg("seed") = 1);
  m.def(
      "population_rank_correlation",
      [](const std::string& family, double param) {
        return population_rank_correlation({parse_family(family), param});
      },
      py::arg("family"), py::arg("param"));
  m.def(
      "calibrate_parameter",
      [](const std::string& family, double target, double tolerance, Eigen::Index n_mc,
         std::uint64_t seed) {
        CalibrationOptions o;
        o.tolerance = tolerance;
        o.n_mc = n_mc;
        o.seed = seed;
        return calibrate_parameter(parse_family(family), target, o);
      },
      py::arg("family"), py::arg("target"), py::arg("tolerance") = 0.005,
      py::arg("n_mc") = 200000, py::arg("seed") = 20240101);
  m.def(
      "coverage_experiment",
      [](const std::string& family, double param, Eigen::Index n, int reps,
         const std::vector<std::string>& methods, double alpha, double omega, std::uint64_t seed,
         int bootstrap_reps, unsigned threads) {
        CoverageConfig c;
        c.model = {parse_family(family), param};
        c.n = n;
        c.reps = reps;
        c.methods.clear();
        for (const auto& name : methods) c.methods.push_back(parse_method(name));
        c.alpha = alpha;
        c.rule = TieRule(omega);
        c.seed = seed;
        c.bootstrap_reps = bootstrap_reps;
        c.threads = threads;
        const CoverageResult r = coverage_experiment(c);
        py::dict out;
        out["truth"] = r.truth;
        for (const auto& row : r.rows) {
          py::dict d;
          d["coverage"] = row.coverage;
          d["mc_se"] = row.mc_se;
          d["mean_width"] = row.mean_width;
          d["mean_se"] = row.mean_se;
          d["failures"] = row.failures;
          out[py::str(std::string(to_string(row.method)))] = d;
        }
        return out;
      },
      py::arg("family"), py::arg("param"), py::arg("n") = 1000, py::arg("reps") = 1000,
      py::arg("methods") = std::vector<std::string>{"plugin", "hom", "ew"},
      py::arg("alpha") = 0.05, py::arg("omega") = 1.0, py::arg("seed") = 1,
      py::arg("bootstrap_reps") = 199, py::arg("threads") = 1);
}
