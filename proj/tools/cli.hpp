// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace uniform::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (args[0] is the subcommand). Output goes to the
/// given streams so tests can capture it.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uniform::cli
