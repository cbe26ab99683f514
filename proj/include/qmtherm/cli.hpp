#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qmtherm/error.hpp"

namespace qmtherm {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitPass = 0,
  kExitChecksFailed = 2,
  kExitInvalidInput = 3,
  kExitInternal = 4,
};

int exit_code_for(ErrorKind kind);

/// Entry point shared by the `qmtherm` binary and the tests. `args` excludes
/// the program name. Reports go to `out`, structured errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qmtherm
