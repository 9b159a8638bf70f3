#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evac {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitCalibrationFail = 1,
  kExitBadFlags = 2,
  kExitLayoutError = 3,
  kExitIoError = 4,
};

/// Runs the `evacsim` command line (arguments without the program name).
/// Subcommands: run, sweep, calibrate, layout.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evac
