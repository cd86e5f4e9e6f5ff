#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tvseg::cli {

/// Runs the command line `args` (without the program name). Returns the
/// process exit code: 0 success, 2 invalid input, 3 solver capacity.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tvseg::cli
