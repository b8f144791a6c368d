// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rfeig/common.hpp"

namespace rfeig {

/// Exit codes: 0 success/converged, 1 usage error from the argument parser,
/// 2 solver did not converge, 3 input error, 4 numerical failure.
enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_not_converged = 2,
  exit_input_error = 3,
  exit_numerical_error = 4,
};

/// Parses "1.5", "-2e3+4.5i", "1.2i" style complex literals.
cd parse_complex(const std::string& s);

/// Comma-separated list of complex literals.
std::vector<cd> parse_complex_list(const std::string& s);

/// Full CLI entry point; out/err receive normal and diagnostic output.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rfeig
