#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mpsc {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitCap = 3,
  kExitNumerical = 4,
  kExitDimension = 5,
};

/// Entry point of the `mpsc` tool. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace mpsc
