#pragma once

// Run configuration, its JSON echo and the report encoders.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "app/csv.hpp"
#include "rankreg/copula.hpp"
#include "rankreg/inference.hpp"
#include "rankreg/resampling.hpp"

namespace rankreg::app {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum class Command { Fit, Sweep, Coverage, Curve, Calibrate };

std::string_view to_string(Command c);
Command parse_command(std::string_view name);

struct RunConfig {
  Command command = Command::Fit;
  std::string input;  // CSV path for fit and sweep
  Spec spec = Spec::RankRank;
  double omega = 1.0;
  bool omega_given = false;
  double alpha = 0.05;
  std::vector<Method> se{Method::Plugin};
  int bootstrap_reps = 999;
  CiKind ci_kind = CiKind::Percentile;
  std::vector<double> theta_p;
  ColumnSpec columns;
  std::uint64_t seed = 1;

  std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};  // sweep

  Family family = Family::Gaussian;  // coverage, curve, calibrate
  std::optional<double> param;       // coverage: calibrated to target when absent
  double target = 0.384;
  Eigen::Index n = 1000;
  int reps = 1000;
  Eigen::Index n_mc = 200000;
  double tolerance = 0.005;
  std::vector<double> curve_grid;  // empty = 41-point default

  // Not echoed: neither changes any reported number.
  std::string out;
  unsigned threads = 1;

  /// Throws InvalidInput on out-of-range values.
  void validate() const;
};

/// Every field except out and threads.
Json config_to_json(const RunConfig& c);
/// Accepts a bare config or a whole report carrying a "config" member.
RunConfig config_from_json(const Json& j);

/// Numbers as %.17g.
std::string format_number(double v);

}  // namespace rankreg::app
