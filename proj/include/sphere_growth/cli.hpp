#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sphere_growth {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitFlagged = 3;

/// Runs one command. `args` excludes the program name. Output files named
/// by options are written directly; everything else goes to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sphere_growth
