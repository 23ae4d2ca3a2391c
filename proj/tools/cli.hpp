// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hardneg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Parses `args` (args[0] is the program name) and runs one subcommand:
/// pretrain, probe, knn, stats or ablate. Results go to files or `out`,
/// diagnostics to `err`. Returns 0 on success, 1 on usage errors and 2 on
/// runtime failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hardneg::cli
