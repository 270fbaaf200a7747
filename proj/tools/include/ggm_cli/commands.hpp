#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ggm::cli {

enum ExitCode : int {
  kOk = 0,
  kFlagError = 2,
  kFormatError = 3,
  kNonConvergence = 4,
  kCorruptStream = 5,
};

/// Runs one ggmtool invocation. args excludes the program name. Errors are
/// reported as a single line on err:
///   error code=<n> kind=<kind> message=<text>
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ggm::cli
