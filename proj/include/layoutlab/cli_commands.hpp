#pragma once

#include <iosfwd>

namespace layoutlab {

/// Entry point for the command-line tool. Returns the process exit code:
///   0 success, 1 usage error, 2 bad input data or infeasible request,
///   3 internal failure (including a failed selftest).
int run_cli(int argc, const char* const* argv);

/// Built-in smoke checks (round-trips, metric identities, solver closure,
/// determinism). Prints one line per suite; true when everything passed.
bool run_selftest(std::ostream& os);

}  // namespace layoutlab
