#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cholqr::cli {

enum ExitCode : int { ok = 0, io_error = 1, usage_error = 2, breakdown = 3 };

/// Runs one `cholqr` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cholqr::cli
