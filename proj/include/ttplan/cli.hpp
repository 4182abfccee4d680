#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ttplan {

/// Exit codes of cli_dispatch.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Runs one subcommand (gen, fit, predict, evaluate, simulate, rally, grid).
/// Results go to --output or `out`; diagnostics go to `err`.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_dispatch(int argc, char** argv);

}  // namespace ttplan
