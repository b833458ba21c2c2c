#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcvd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Runs the command line `args` (without the program name). Output files go
/// where the flags say; CSV written to stdout goes to `out`, diagnostics to
/// `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcvd::cli
