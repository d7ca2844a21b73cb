#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tcsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;

/// Command-line entry point: `run`, `scan` and `defaults` subcommands.
/// args[0] is the program name.
int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tcsim::cli
