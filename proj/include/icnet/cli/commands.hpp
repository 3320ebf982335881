// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace icnet::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailures = 1;   // verification found violations
inline constexpr int kExitBudget = 2;     // budget exceeded or inconclusive boxes
inline constexpr int kExitUsage = 3;      // bad arguments, parse or schema errors

/// Runs the command line `args` (without the program name). Output goes to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv);

} // namespace icnet::cli
