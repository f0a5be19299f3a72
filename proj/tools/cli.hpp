#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vouch/error.hpp"

namespace vouch::cli {

// Process exit codes, one per error class.
enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kParseError = 2,
  kValidationError = 3,
  kInsufficientFunds = 4,
  kLinkFailure = 5,
};

int exit_code_for(Errc code) noexcept;

/// Runs one command. `args` excludes the program name. Results go to `out`
/// as a single JSON document (or CSV for `rescan --format csv`); diagnostics
/// go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vouch::cli
