#pragma once

#include <iosfwd>

namespace smpe {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNoConvergence = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInternal = 3;

/// Runs one `smpe` command. argv[0] is the program name. Results go to `out`,
/// diagnostics and usage messages to `err`.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smpe
