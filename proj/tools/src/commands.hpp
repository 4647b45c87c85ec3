#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "conedet/errors.hpp"

namespace conedet::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidExtension = 1,
  kExitParse = 2,
  kExitKernel = 3,
  kExitDegenerate = 4,
  kExitNumeric = 5,
};

int exit_code(ErrorCode code);

/// Seed for randomized batteries: CONEDET_SEED, or 12345 when unset or unparsable.
std::uint64_t seed_from_environment();

/// Runs `conedet <command> <file> [flags]`. args excludes the program name.
/// The report goes to out, diagnostics to err; the return value is the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conedet::cli
