#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace copronn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

/// Entry point shared by the `copronn` binary and the tests. `args` excludes
/// the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace copronn
