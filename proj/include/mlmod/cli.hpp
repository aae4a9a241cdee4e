#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlmod::cli {

enum ExitCode { kOk = 0, kUsage = 2, kValidation = 3, kNumerical = 4 };

// args excludes the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlmod::cli
