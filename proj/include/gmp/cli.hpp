// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gmp::cli {

struct CommandResult {
    int exit_code = 0; // 0 ok, 1 user error, 2 internal error
    std::vector<std::string> artifacts;
    std::string summary;
};

/// Runs one invocation of the gmpsim tool. Human-readable output goes to
/// `out`, diagnostics to `err`; the last line on `out` is always a JSON
/// summary of the command.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gmp::cli
