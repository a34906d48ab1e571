#pragma once
// Command-line front end: run, sweep, stats, success.

#include <ostream>

namespace ssa::cli {

// Parses argv and executes one subcommand. Returns the process exit code
// (see ExitCode); diagnostics go to `err`, progress and results to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ssa::cli
