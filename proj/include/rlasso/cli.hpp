#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rlasso::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kRankDeficient = 3,
  kInvalidFlags = 4,
  kReplicationFailures = 5,
};

/// Entry point shared by the executable and the tests. args[0] is the program
/// name. Reports go to `out` (or to --output), diagnostics and the run log to
/// `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rlasso::cli
