#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace idrkit::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitNotConverged = 3,
};

/// Runs one subcommand. `args` excludes the program name. Results go to
/// `out` or to the files named by flags; diagnostics go to `err` with an
/// "error[CODE]:" prefix.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace idrkit::cli
