#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cot::cli {

// Entry point of the cotbench tool. `args` excludes the program name.
// Returns one of the ExitCode values.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cot::cli
