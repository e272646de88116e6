#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dnnflab::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kUsage = 2, kCapacity = 3 };

/// Runs one `dnnflab` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dnnflab::cli
