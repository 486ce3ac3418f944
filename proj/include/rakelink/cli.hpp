#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rakelink {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2 };

/// Runs one command; `args` excludes the program name. Results go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv);

}  // namespace rakelink
