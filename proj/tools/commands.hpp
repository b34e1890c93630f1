#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rellich::cli {

enum ExitCode : int { exit_ok = 0, exit_not_converged = 1, exit_bad_arguments = 2, exit_cache_corrupt = 3 };

/// Parses "a:b:step" (inclusive) or a comma-separated list into values.
std::vector<double> parse_values(const std::string& spec);

/// Entry point of the rellich tool; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rellich::cli
