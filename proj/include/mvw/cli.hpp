#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvw {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3 };

/// Entry point of the `mvw` tool. `args` excludes the program name.
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mvw
