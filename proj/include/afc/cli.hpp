#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace afc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitConfig = 2;

/// Runs one `afc` invocation; args[0] is the program name. Reports go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace afc::cli
