#pragma once

#include <exception>
#include <ostream>
#include <string>
#include <vector>

#include "app/report.hpp"

namespace rankreg::app {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitData = 1,        // I/O and input-data errors
  kExitAssumption = 2,  // singular design, assumption violations, failed calibration
  kExitArgument = 3,    // invalid argument values
};

struct RunOutput {
  std::string body;  // JSON (fit, sweep, calibrate) or CSV (coverage, curve)
  std::vector<std::string> warnings;
};

/// Runs one command and renders its report. Throws rankreg errors.
RunOutput execute(const RunConfig& config);

/// Maps an exception to an exit code.
int exit_code_for(const std::exception& e);

/// execute() plus output to config.out (or `out`), warnings and errors to
/// `err`. Returns the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace rankreg::app
