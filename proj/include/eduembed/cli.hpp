#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace eduembed {

/// Runs one subcommand. `args` excludes the program name. Returns the exit status:
/// 0 success, 1 usage, 2 data/validation, 3 numeric/runtime, 4 network.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eduembed
