#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spherecover::cli {

/// Runs the command line `args` (without the program name). CSV goes to `out` unless --out is
/// given; diagnostics go to `err`. Returns the process exit code:
/// 0 success, 1 usage, 2 model validation, 3 non-convergence, 4 cap exceeded.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Inclusive grid a, a+step, ..., <= b from "a:b:step", or a comma list "x,y,z".
std::vector<double> parse_grid(const std::string& spec);

}  // namespace spherecover::cli
