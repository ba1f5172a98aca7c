#pragma once

#include <iosfwd>

namespace permalloc::cli {

enum ExitCode : int {
  kOk = 0,
  kUnsatisfied = 1,
  kBadInput = 2,
  kOverCap = 3,
  kDegenerate = 4,
};

/// Runs the command line; output goes to `out` unless --out is given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace permalloc::cli
