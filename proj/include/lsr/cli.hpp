#pragma once

// The command-line surface. run_cli takes argv[1..] and returns the
// process exit code:
//   0 success          4 rank deficiency
//   1 unexpected       5 storage (missing/corrupt files)
//   2 usage            6 input parse (line-numbered text formats)
//   3 shape/precondition  7 configuration
//
// Tests drive this entry point directly; main() is a two-line shim.

#include <string>
#include <vector>

namespace lsr {

int run_cli(const std::vector<std::string>& args);

}  // namespace lsr
