// rankreg: rank regressions with valid standard errors from the command line.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "app/run.hpp"

namespace {

using rankreg::app::Command;
using rankreg::app::RunConfig;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s, const char* flag) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw rankreg::InvalidInput(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  return out;
}

struct Raw {
  std::string spec = "rank-rank";
  std::string se;
  std::string ci_kind = "percentile";
  std::string theta_p;
  std::string w_cols;
  std::string grid;
  std::string family = "gaussian";
  std::string config_path;
};

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  Raw raw;
  CLI::App app{"Rank-rank, level-rank and rank-level regressions with plugin, naive and "
               "bootstrap standard errors, plus a copula simulation lab."};
  app.require_subcommand(0, 1);
  app.add_option("--config", raw.config_path,
                 "Re-run the configuration echoed in a previous JSON report");
  app.add_option("--out", cfg.out, "With --config: write the report here");
  app.add_option("--threads", cfg.threads, "With --config: worker threads");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Write the report here instead of stdout");
    sub->add_option("--threads", cfg.threads, "Worker threads (0 = all); results do not depend on it");
    sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  };
  auto data_opts = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input, "CSV file with a header row")->required();
    sub->add_option("--spec", raw.spec, "rank-rank | rank-rank-group | level-rank | rank-level")
        ->capture_default_str();
    sub->add_option("--omega", cfg.omega, "Tie weight in [0, 1]: 1 largest rank, 0.5 mid-rank, 0 smallest")
        ->capture_default_str();
    sub->add_option("--alpha", cfg.alpha, "1 - confidence level")->capture_default_str();
    sub->add_option("--y-col", cfg.columns.y, "Outcome column")->capture_default_str();
    sub->add_option("--x-col", cfg.columns.x, "Ranked regressor column")->capture_default_str();
    sub->add_option("--w-cols", raw.w_cols, "Comma-separated covariate columns");
    sub->add_option("--group-col", cfg.columns.group, "Subpopulation column (rank-rank-group)");
    sub->add_flag("--no-intercept", [&](std::int64_t) { cfg.columns.intercept = false; },
                  "Do not add an intercept to W");
    sub->add_flag("--drop-missing", cfg.columns.drop_missing,
                  "Skip rows with missing values instead of failing");
  };
  auto se_opts = [&](CLI::App* sub, const char* def) {
    raw.se = def;
    sub->add_option("--se", raw.se, "Comma-separated: plugin, hom, ew, bootstrap")->capture_default_str();
    sub->add_option("--bootstrap-reps", cfg.bootstrap_reps, "Bootstrap replicates")->capture_default_str();
    sub->add_option("--ci-kind", raw.ci_kind, "Bootstrap interval: percentile | normal")
        ->capture_default_str();
  };

  CLI::App* fit = app.add_subcommand("fit", "Fit one regression and report standard errors");
  data_opts(fit);
  se_opts(fit, "plugin");
  fit->add_option("--theta-p", raw.theta_p, "Comma-separated p for theta_p = beta + rho p");
  common(fit);

  CLI::App* sweep = app.add_subcommand("sweep", "Refit over a grid of tie weights");
  data_opts(sweep);
  sweep->add_option("--grid", raw.grid, "Comma-separated omegas")->default_str("0,0.25,0.5,0.75,1");
  common(sweep);

  CLI::App* coverage = app.add_subcommand("coverage", "Monte Carlo coverage of confidence intervals");
  coverage->add_option("--family", raw.family, "gaussian | t1 | quadratic | lemma2 | independence")
      ->capture_default_str();
  coverage->add_option("--param", cfg.param, "Copula parameter (default: calibrated to --target)");
  coverage->add_option("--target", cfg.target, "Rank correlation used for calibration")->capture_default_str();
  coverage->add_option("--n", cfg.n, "Sample size")->capture_default_str();
  coverage->add_option("--reps", cfg.reps, "Monte Carlo replications")->capture_default_str();
  coverage->add_option("--omega", cfg.omega, "Tie weight")->capture_default_str();
  coverage->add_option("--alpha", cfg.alpha, "1 - confidence level")->capture_default_str();
  coverage->add_option("--n-mc", cfg.n_mc, "Draws used for calibration")->capture_default_str();
  coverage->add_option("--tolerance", cfg.tolerance, "Calibration tolerance")->capture_default_str();
  se_opts(coverage, "plugin,hom,ew");
  common(coverage);

  CLI::App* curve = app.add_subcommand("curve", "Variance curves over a copula family");
  curve->add_option("--family", raw.family, "gaussian | t1 | quadratic | lemma2 | independence")
      ->capture_default_str();
  curve->add_option("--grid", raw.grid, "Comma-separated parameters (default: 41 points)");
  curve->add_option("--n-mc", cfg.n_mc, "Monte Carlo draws per point")->capture_default_str();
  common(curve);

  CLI::App* calibrate = app.add_subcommand("calibrate", "Find the parameter with a given rank correlation");
  calibrate->add_option("--family", raw.family, "gaussian | t1 | quadratic | lemma2")->capture_default_str();
  calibrate->add_option("--target", cfg.target, "Target rank correlation")->capture_default_str();
  calibrate->add_option("--tolerance", cfg.tolerance, "Bisection tolerance")->capture_default_str();
  calibrate->add_option("--n-mc", cfg.n_mc, "Monte Carlo draws")->capture_default_str();
  common(calibrate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rankreg::app::kExitArgument;
  }

  try {
    if (!raw.config_path.empty()) {
      std::ifstream in(raw.config_path);
      if (!in) throw rankreg::app::DataError("cannot open '" + raw.config_path + "'");
      rankreg::app::Json j;
      try {
        j = rankreg::app::Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw rankreg::app::DataError(raw.config_path + ": " + e.what());
      }
      RunConfig replay = rankreg::app::config_from_json(j);
      replay.out = cfg.out;
      replay.threads = cfg.threads;
      return rankreg::app::run(replay, std::cout, std::cerr);
    }
    CLI::App* chosen = nullptr;
    for (CLI::App* s : {fit, sweep, coverage, curve, calibrate}) {
      if (s->parsed()) chosen = s;
    }
    if (!chosen) {
      std::cerr << app.help();
      return rankreg::app::kExitArgument;
    }
    cfg.command = rankreg::app::parse_command(chosen->get_name());
    if (chosen->get_option_no_throw("--spec")) cfg.spec = rankreg::parse_spec(raw.spec);
    if (auto* o = chosen->get_option_no_throw("--omega")) cfg.omega_given = o->count() > 0;
    if (chosen->get_option_no_throw("--se")) {
      cfg.se.clear();
      for (const auto& m : split_list(raw.se)) cfg.se.push_back(rankreg::parse_method(m));
      cfg.ci_kind = rankreg::parse_ci_kind(raw.ci_kind);
    }
    if (!raw.theta_p.empty()) cfg.theta_p = parse_doubles(raw.theta_p, "--theta-p");
    if (!raw.w_cols.empty()) cfg.columns.w = split_list(raw.w_cols);
    if (chosen->get_option_no_throw("--family")) cfg.family = rankreg::parse_family(raw.family);
    if (cfg.command == Command::Sweep && !raw.grid.empty()) {
      cfg.grid = parse_doubles(raw.grid, "--grid");
    }
    if (cfg.command == Command::Curve && !raw.grid.empty()) {
      cfg.curve_grid = parse_doubles(raw.grid, "--grid");
    }
    if (cfg.command == Command::Fit && cfg.spec == rankreg::Spec::RankRankByGroup &&
        !cfg.columns.group) {
      throw rankreg::InvalidInput("rank-rank-group needs --group-col");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rankreg::app::exit_code_for(e);
  }
  return rankreg::app::run(cfg, std::cout, std::cerr);
}
