#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcl {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,      // bad arguments or parameter values
  kExitData = 2,       // unreadable, malformed or degenerate input
  kExitNumerical = 3,  // non-convergence or numerical failure
};

/// Runs the tool. `args` excludes the program name. Results go to `out`,
/// each failure to `err` as one line "error: <kind>: <message>".
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcl
