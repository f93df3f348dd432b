#include "app/run.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "rankreg/copula.hpp"
#include "rankreg/errors.hpp"

namespace rankreg::app {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Json report_json(const InferenceReport& r) {
  Json j;
  j["method"] = to_string(r.method);
  j["alpha"] = r.alpha;
  j["se"] = std::vector<double>(r.se.data(), r.se.data() + r.se.size());
  Json ci = Json::array();
  for (const Interval& iv : r.ci) ci.push_back({iv.lower, iv.upper});
  j["ci"] = ci;
  Json var = Json::array();
  for (Index a = 0; a < r.variance.rows(); ++a) {
    Json row = Json::array();
    for (Index b = 0; b < r.variance.cols(); ++b) row.push_back(r.variance(a, b));
    var.push_back(row);
  }
  j["variance"] = var;
  return j;
}

std::optional<Index> intercept_column(const Dataset& d) {
  for (Index c = 0; c < d.p(); ++c) {
    if (static_cast<std::size_t>(c) < d.w_names.size() && d.w_names[static_cast<std::size_t>(c)] == "intercept") {
      return c;
    }
  }
  for (Index c = 0; c < d.p(); ++c) {
    if ((d.w.col(c).array() == 1.0).all()) return c;
  }
  return std::nullopt;
}

// Shape and size problems in the file are data errors, not bad arguments.
void validate_data(const Dataset& d, Spec spec) {
  try {
    d.validate(spec);
  } catch (const InvalidInput& e) {
    throw DataError(e.what());
  }
}

std::size_t ties_in(const VectorXd& v) {
  return tied_observations({v.data(), static_cast<std::size_t>(v.size())});
}

struct MethodResult {
  InferenceReport report;
  std::optional<BootstrapDraws> draws;
};

MethodResult infer(Method m, const FitResult& f, const Dataset& d, const RunConfig& c) {
  switch (m) {
    case Method::Plugin: return {plugin_inference(f, d, c.alpha).report, std::nullopt};
    case Method::Hom: return {naive_hom_variance(f, d, c.alpha), std::nullopt};
    case Method::EW: return {naive_ew_variance(f, d, c.alpha), std::nullopt};
    case Method::Bootstrap: {
      BootstrapPlan plan;
      plan.reps = c.bootstrap_reps;
      plan.seed = c.seed;
      plan.ci_kind = c.ci_kind;
      plan.alpha = c.alpha;
      plan.threads = c.threads;
      BootstrapDraws draws = bootstrap_distribution(d, f.spec, f.rule, plan);
      InferenceReport rep = bootstrap_report(draws, f.coefficients(), d.n(), plan);
      return {std::move(rep), std::move(draws)};
    }
  }
  throw InvalidInput("unknown method");
}

Json theta_block(const FitResult& f, const Dataset& d, const RunConfig& c,
                 const std::vector<MethodResult>& results, std::vector<std::string>& warnings) {
  Json out = Json::array();
  if (c.theta_p.empty()) return out;
  if (!f.has_ranked_regressor()) {
    warnings.push_back("--theta-p ignored: rank-level regressions have no rank slope");
    return out;
  }
  const auto ic = intercept_column(d);
  if (!ic) {
    warnings.push_back("--theta-p ignored: W has no intercept column");
    return out;
  }
  const VectorXd coef = f.coefficients();
  const Index per = f.coefficients_per_group();
  for (std::size_t g = 0; g < f.groups.size(); ++g) {
    for (double p : c.theta_p) {
      VectorXd w = VectorXd::Zero(coef.size());
      const Index base = static_cast<Index>(g) * per;
      w(base) = p;
      w(base + 1 + *ic) = 1.0;
      Json entry;
      entry["p"] = p;
      if (!f.groups[g].label.empty()) entry["group"] = f.groups[g].label;
      entry["estimate"] = w.dot(coef);
      Json methods = Json::object();
      for (const MethodResult& r : results) {
        Json m;
        if (r.draws) {
          BootstrapPlan plan;
          plan.ci_kind = c.ci_kind;
          plan.alpha = c.alpha;
          const VectorXd reps = r.draws->replicates * w;
          std::vector<double> v(reps.data(), reps.data() + reps.size());
          const Interval iv = bootstrap_ci(v, w.dot(coef), plan);
          m["se"] = v.size() > 1 ? std::sqrt(static_cast<double>(d.n())) * sample_sd(v) : 0.0;
          m["ci"] = {iv.lower, iv.upper};
        } else {
          const InferenceReport lc =
              linear_combo_inference(r.report.variance, w, coef, d.n(), c.alpha);
          m["se"] = lc.se(0);
          m["ci"] = {lc.ci[0].lower, lc.ci[0].upper};
        }
        methods[std::string(to_string(r.report.method))] = m;
      }
      entry["inference"] = methods;
      out.push_back(entry);
    }
  }
  return out;
}

void tie_warnings(const RunConfig& c, std::size_t ties_x, std::size_t ties_y,
                  std::vector<std::string>& warnings) {
  const bool ranked_ties = ties_x > 0 || ties_y > 0;
  if (!ranked_ties) return;
  for (Method m : c.se) {
    if (m == Method::Hom || m == Method::EW) {
      warnings.push_back(
          "ties present: the hom/ew standard errors ignore the estimation error in the "
          "ranks and are not valid for this regression; use plugin or bootstrap");
      break;
    }
  }
  if (!c.omega_given && (c.spec == Spec::RankRank || c.spec == Spec::RankRankByGroup)) {
    warnings.push_back(
        "ties present and --omega not given: the estimand depends on the tie rule "
        "(using omega = " + format_number(c.omega) + ")");
  }
}

Json fit_json(const RunConfig& c, std::vector<std::string>& warnings) {
  const Ingested ing = ingest_csv_file(c.input, c.columns, c.spec);
  const Dataset& d = ing.data;
  validate_data(d, c.spec);
  const TieRule rule(c.omega);
  const FitResult f = fit(c.spec, d, rule);

  const std::size_t ties_x = f.has_ranked_regressor() ? ties_in(d.x) : 0;
  const std::size_t ties_y = f.has_ranked_outcome() ? ties_in(d.y) : 0;
  tie_warnings(c, ties_x, ties_y, warnings);

  std::vector<MethodResult> results;
  for (Method m : c.se) results.push_back(infer(m, f, d, c));

  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "fit";
  j["spec"] = to_string(c.spec);
  j["omega"] = c.omega;
  j["n"] = d.n();
  j["p"] = d.p();
  const VectorXd coef = f.coefficients();
  const auto names = f.coefficient_names(d.w_names);
  Json cs = Json::array();
  for (Index k = 0; k < coef.size(); ++k) {
    cs.push_back({{"name", names[static_cast<std::size_t>(k)]}, {"estimate", coef(k)}});
  }
  j["coefficients"] = cs;
  Json inf = Json::object();
  for (const MethodResult& r : results) inf[std::string(to_string(r.report.method))] = report_json(r.report);
  j["inference"] = inf;
  j["theta_p"] = theta_block(f, d, c, results, warnings);

  Json diag;
  Json rc = Json::array();
  for (const GroupFit& g : f.groups) rc.push_back(g.rcond);
  diag["rcond"] = rc;
  Json ties;
  if (f.has_ranked_regressor()) ties["x"] = ties_x;
  ties["y"] = ties_in(d.y);
  diag["ties"] = ties;
  if (d.groups) {
    Json groups = Json::array();
    for (const GroupFit& g : f.groups) {
      groups.push_back({{"label", g.label}, {"n", g.rows.size()}});
    }
    diag["groups"] = groups;
  }
  diag["rows_read"] = ing.rows_read;
  diag["rows_dropped"] = ing.rows_dropped;
  for (const MethodResult& r : results) {
    if (r.draws) diag["bootstrap_rejected"] = r.draws->rejected;
  }
  j["diagnostics"] = diag;
  return j;
}

Json sweep_json(const RunConfig& c) {
  const Ingested ing = ingest_csv_file(c.input, c.columns, c.spec);
  const Dataset& d = ing.data;
  validate_data(d, c.spec);
  const SweepTable t = omega_sweep(d, c.spec, c.grid, c.alpha);
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "sweep";
  j["spec"] = to_string(c.spec);
  j["n"] = d.n();
  j["names"] = t.names;
  Json rows = Json::array();
  for (const SweepRow& r : t.rows) {
    rows.push_back({{"omega", r.omega},
                    {"estimates", std::vector<double>(r.estimates.data(), r.estimates.data() + r.estimates.size())},
                    {"se", std::vector<double>(r.se.data(), r.se.data() + r.se.size())}});
  }
  j["rows"] = rows;
  j["grid_average"] =
      std::vector<double>(t.grid_average.data(), t.grid_average.data() + t.grid_average.size());
  return j;
}

CalibrationOptions calibration_options(const RunConfig& c) {
  CalibrationOptions o;
  o.tolerance = c.tolerance;
  o.n_mc = c.n_mc;
  o.seed = c.seed;
  return o;
}

Json calibrate_json(const RunConfig& c) {
  const CalibrationOptions opt = calibration_options(c);
  const double param = calibrate_parameter(c.family, c.target, opt);
  Rng rng(opt.seed);
  const double achieved = mc_rank_correlation({c.family, param}, draw_base(opt.n_mc, rng));
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "calibrate";
  j["family"] = to_string(c.family);
  j["target"] = c.target;
  j["param"] = param;
  j["achieved_rank_correlation"] = achieved;
  return j;
}

std::string coverage_csv(const RunConfig& c) {
  double param = 0.0;
  if (c.param) {
    param = *c.param;
  } else if (c.family != Family::Independence) {
    param = calibrate_parameter(c.family, c.target, calibration_options(c));
  }
  CoverageConfig cc;
  cc.model = {c.family, param};
  cc.n = c.n;
  cc.reps = c.reps;
  cc.methods = c.se;
  cc.alpha = c.alpha;
  cc.rule = TieRule(c.omega);
  cc.seed = c.seed;
  cc.bootstrap_reps = c.bootstrap_reps;
  cc.bootstrap_ci = c.ci_kind;
  cc.threads = c.threads;
  const CoverageResult r = coverage_experiment(cc);

  std::ostringstream os;
  os << "schema_version,family,param,truth,n,reps,alpha";
  for (const CoverageRow& row : r.rows) {
    const std::string m(to_string(row.method));
    os << ",coverage_" << m << ",mc_se_" << m << ",mean_width_" << m << ",mean_se_" << m
       << ",failures_" << m;
  }
  os << '\n'
     << kSchemaVersion << ',' << to_string(c.family) << ',' << format_number(param) << ','
     << format_number(r.truth) << ',' << c.n << ',' << c.reps << ',' << format_number(c.alpha);
  for (const CoverageRow& row : r.rows) {
    os << ',' << format_number(row.coverage) << ',' << format_number(row.mc_se) << ','
       << format_number(row.mean_width) << ',' << format_number(row.mean_se) << ','
       << row.failures;
  }
  os << '\n';
  return os.str();
}

std::string curve_csv(const RunConfig& c) {
  const std::vector<double> grid = c.curve_grid.empty() ? default_curve_grid(c.family) : c.curve_grid;
  const auto pts = variance_curve(c.family, grid, c.n_mc, c.seed, c.threads);
  std::ostringstream os;
  os << "schema_version,family,param,sigma2,sigma2_hom,sigma2_ew,rho\n";
  for (const CurvePoint& p : pts) {
    os << kSchemaVersion << ',' << to_string(c.family) << ',' << format_number(p.param) << ','
       << format_number(p.value.sigma2) << ',' << format_number(p.value.sigma2_hom) << ','
       << format_number(p.value.sigma2_ew) << ',' << format_number(p.value.rho) << '\n';
  }
  return os.str();
}

}  // namespace

RunOutput execute(const RunConfig& c) {
  c.validate();
  RunOutput out;
  Json j;
  switch (c.command) {
    case Command::Fit: j = fit_json(c, out.warnings); break;
    case Command::Sweep: j = sweep_json(c); break;
    case Command::Calibrate: j = calibrate_json(c); break;
    case Command::Coverage: out.body = coverage_csv(c); return out;
    case Command::Curve: out.body = curve_csv(c); return out;
  }
  j["warnings"] = out.warnings;
  j["config"] = config_to_json(c);
  out.body = j.dump(2) + "\n";
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DataError*>(&e)) return kExitData;
  if (dynamic_cast<const InvalidInput*>(&e)) return kExitArgument;
  if (dynamic_cast<const AssumptionViolation*>(&e) || dynamic_cast<const SingularDesign*>(&e) ||
      dynamic_cast<const DegenerateInput*>(&e) || dynamic_cast<const CalibrationFailure*>(&e) ||
      dynamic_cast<const ResamplingFailure*>(&e)) {
    return kExitAssumption;
  }
  return kExitData;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    const RunOutput r = execute(c);
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    if (c.out.empty()) {
      out << r.body;
      out.flush();
    } else {
      std::ofstream f(c.out, std::ios::binary);
      if (!f) throw DataError("cannot write '" + c.out + "'");
      f << r.body;
      if (!f) throw DataError("failed writing '" + c.out + "'");
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace rankreg::app
