#pragma once

// Command-line front end shared by the `dce` executable and the tests.

#include <iosfwd>
#include <string>
#include <vector>

namespace dce {

/// Parses `args` (without the program name), runs the selected subcommand
/// and returns the process exit code: 0 success, 2 configuration error,
/// 3 regime violation, 4 numerical failure, 5 crosscheck failure.
/// Settings resolve as defaults < config file < DCE_* environment < flags.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv);

}  // namespace dce
