#pragma once

#include <string>
#include <vector>

namespace medtrade {

/// Command-line front end. Exit codes: 0 success/feasible, 1 infeasible,
/// 2 input error, 3 assumption failure.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace medtrade
