#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace memfuzz {

/// Runs the command line tool. `args` excludes the program name.
/// Returns 0 on success, 1 on parse, validation or shape failure, 2 on
/// usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace memfuzz
