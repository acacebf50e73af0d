#pragma once

#include <string>
#include <vector>

namespace courtsim::cli {

/// Entry point behind the courtsim binary. args excludes the program name.
/// Exit codes: 0 success, 1 run failure, 2 usage/config error.
int run_cli(const std::vector<std::string>& args);

int run_cli(int argc, const char* const* argv);

}  // namespace courtsim::cli
