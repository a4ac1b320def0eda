#pragma once

#include <iosfwd>

namespace acdma::cli {

enum ExitCode : int { exit_ok = 0, exit_failed_property = 1, exit_invalid = 2, exit_nonconvergence = 3 };

/// Parses arguments, runs one subcommand and returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace acdma::cli
