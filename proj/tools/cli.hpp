#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dpinv::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_input = 2,
    exit_numerical = 3,
};

/// Runs the dpinv command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace dpinv::cli
