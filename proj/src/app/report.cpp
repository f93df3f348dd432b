#include "app/report.hpp"

#include <cstdio>

namespace rankreg::app {

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Fit: return "fit";
    case Command::Sweep: return "sweep";
    case Command::Coverage: return "coverage";
    case Command::Curve: return "curve";
    case Command::Calibrate: return "calibrate";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  if (name == "fit") return Command::Fit;
  if (name == "sweep") return Command::Sweep;
  if (name == "coverage") return Command::Coverage;
  if (name == "curve") return Command::Curve;
  if (name == "calibrate") return Command::Calibrate;
  throw InvalidInput("unknown command '" + std::string(name) + "'");
}

void RunConfig::validate() const {
  TieRule{omega};
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("--alpha must lie in (0, 1)");
  for (double p : theta_p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("--theta-p values must lie in [0, 1]");
  }
  if (se.empty()) throw InvalidInput("--se needs at least one method");
  if (bootstrap_reps < 1) throw InvalidInput("--bootstrap-reps must be positive");
  for (double w : grid) TieRule{w};
  if (grid.empty()) throw InvalidInput("--grid is empty");
  if (n < 4) throw InvalidInput("--n must be at least 4");
  if (reps < 1) throw InvalidInput("--reps must be positive");
  if (n_mc < 10000) throw InvalidInput("--n-mc must be at least 10000");
  if (!(tolerance > 0.0)) throw InvalidInput("--tolerance must be positive");
  if (param) CopulaModel{family, *param}.validate();
  for (double p : curve_grid) CopulaModel{family, p}.validate();
  if ((command == Command::Fit || command == Command::Sweep) && input.empty()) {
    throw InvalidInput("an input CSV file is required");
  }
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["command"] = to_string(c.command);
  switch (c.command) {
    case Command::Fit:
    case Command::Sweep: {
      j["input"] = c.input;
      j["spec"] = to_string(c.spec);
      j["omega"] = c.omega;
      j["omega_given"] = c.omega_given;
      j["alpha"] = c.alpha;
      Json se = Json::array();
      for (Method m : c.se) se.push_back(to_string(m));
      j["se"] = se;
      j["bootstrap_reps"] = c.bootstrap_reps;
      j["ci_kind"] = to_string(c.ci_kind);
      j["theta_p"] = c.theta_p;
      j["y_col"] = c.columns.y;
      j["x_col"] = c.columns.x;
      j["w_cols"] = c.columns.w;
      j["group_col"] = c.columns.group ? Json(*c.columns.group) : Json(nullptr);
      j["intercept"] = c.columns.intercept;
      j["drop_missing"] = c.columns.drop_missing;
      j["seed"] = c.seed;
      if (c.command == Command::Sweep) j["grid"] = c.grid;
      break;
    }
    case Command::Coverage: {
      j["family"] = to_string(c.family);
      j["param"] = c.param ? Json(*c.param) : Json(nullptr);
      j["target"] = c.target;
      j["n"] = c.n;
      j["reps"] = c.reps;
      j["omega"] = c.omega;
      j["alpha"] = c.alpha;
      Json se = Json::array();
      for (Method m : c.se) se.push_back(to_string(m));
      j["se"] = se;
      j["bootstrap_reps"] = c.bootstrap_reps;
      j["ci_kind"] = to_string(c.ci_kind);
      j["n_mc"] = c.n_mc;
      j["tolerance"] = c.tolerance;
      j["seed"] = c.seed;
      break;
    }
    case Command::Curve:
      j["family"] = to_string(c.family);
      j["grid"] = c.curve_grid;
      j["n_mc"] = c.n_mc;
      j["seed"] = c.seed;
      break;
    case Command::Calibrate:
      j["family"] = to_string(c.family);
      j["target"] = c.target;
      j["tolerance"] = c.tolerance;
      j["n_mc"] = c.n_mc;
      j["seed"] = c.seed;
      break;
  }
  return j;
}

RunConfig config_from_json(const Json& src) {
  const Json& j = src.contains("config") ? src.at("config") : src;
  RunConfig c;
  try {
    c.command = parse_command(j.at("command").get<std::string>());
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key) && !j.at(key).is_null()) {
        field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
      }
    };
    get("input", c.input);
    if (j.contains("spec")) c.spec = parse_spec(j.at("spec").get<std::string>());
    get("omega", c.omega);
    get("omega_given", c.omega_given);
    get("alpha", c.alpha);
    if (j.contains("se")) {
      c.se.clear();
      for (const auto& m : j.at("se")) c.se.push_back(parse_method(m.get<std::string>()));
    }
    get("bootstrap_reps", c.bootstrap_reps);
    if (j.contains("ci_kind")) c.ci_kind = parse_ci_kind(j.at("ci_kind").get<std::string>());
    get("theta_p", c.theta_p);
    get("y_col", c.columns.y);
    get("x_col", c.columns.x);
    get("w_cols", c.columns.w);
    if (j.contains("group_col") && !j.at("group_col").is_null()) {
      c.columns.group = j.at("group_col").get<std::string>();
    }
    get("intercept", c.columns.intercept);
    get("drop_missing", c.columns.drop_missing);
    get("seed", c.seed);
    if (j.contains("family")) c.family = parse_family(j.at("family").get<std::string>());
    if (j.contains("param") && !j.at("param").is_null()) c.param = j.at("param").get<double>();
    get("target", c.target);
    get("n", c.n);
    get("reps", c.reps);
    get("n_mc", c.n_mc);
    get("tolerance", c.tolerance);
    if (c.command == Command::Sweep) get("grid", c.grid);
    if (c.command == Command::Curve) get("grid", c.curve_grid);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed config: ") + e.what());
  }
  return c;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace rankreg::app
