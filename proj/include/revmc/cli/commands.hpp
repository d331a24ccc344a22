#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace revmc::cli {

/// Exit statuses shared by every subcommand.
enum ExitStatus : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitParse = 2,
  kExitValidation = 3,
  kExitRouteRefused = 4,
};

/// Runs the command line `args` (args[0] is the program name). Reports go
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace revmc::cli
