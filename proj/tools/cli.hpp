#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace quakenet::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kData = 2,
    kDomain = 3,
};

/// Runs the quakenet command line; args excludes the program name.
/// Diagnostics go to err as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quakenet::cli
