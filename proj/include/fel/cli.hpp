#pragma once

#include <ostream>

namespace fel {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitBadInput = 2,
  kExitNoConvergence = 3,
};

/// Parses argv, runs one subcommand and streams its reports to `out`.
/// Diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fel
