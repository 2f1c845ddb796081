#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gyrodeblur::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitFormat = 4;
inline constexpr int kExitDomain = 5;

/// Runs the tool with `args` (args[0] is the program name). Machine-readable
/// results go to `out`, diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gyrodeblur::cli
