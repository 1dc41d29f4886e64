#pragma once

#include "dll/cli/args.hpp"

namespace dll::cli {

enum ExitCode { kSuccess = 0, kUsage = 2, kDataError = 3, kNumericalError = 4 };

/// Runs a parsed command; failures propagate as exceptions.
void run_command(const RunConfig& config);

/// Full entry point: parses, runs, reports errors on stderr and maps them to
/// exit codes.
int run_cli(int argc, const char* const* argv);

}  // namespace dll::cli
