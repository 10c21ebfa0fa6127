// Command-line front end, exposed as a library call so tests can drive it.
#pragma once

#include <string>
#include <vector>

namespace ordlab {

struct CliResult {
  int exitCode = 0;
  std::string out;
  std::string err;
};

// Exit codes: 0 success, 1 domain errors, 2 budget and out-of-range errors.
// Output bytes are deterministic for fixed inputs and flags.
CliResult runCli(const std::vector<std::string>& args);

}  // namespace ordlab
