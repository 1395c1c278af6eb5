#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace envstab::cli {

/// Exit codes: 0 success / certified, 1 negative result, 2 inconclusive,
/// 3 usage or input error.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitUsage = 3;

/// Runs one subcommand. `args` excludes the program name. Reports go to
/// `out` (or to a file, see --out and ENVSTAB_OUTPUT_DIR), diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace envstab::cli
