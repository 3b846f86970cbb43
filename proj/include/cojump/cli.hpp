#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cojump::cli {

/// Runs `simulate`, `test` or `mc`. `args` excludes the program name.
/// Returns the process exit status; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cojump::cli
