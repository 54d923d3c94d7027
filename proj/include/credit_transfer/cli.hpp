#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace credit_transfer {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumerical = 4,
};

/// Runs one command line (without the program name). Results go to `out`;
/// failures print a single JSON line to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace credit_transfer
