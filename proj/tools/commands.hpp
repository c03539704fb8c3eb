#pragma once

#include <string>
#include <vector>

namespace edgeplan::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kInfeasible = 2,
  kCheckFailed = 3,  // a validation suite or golden check reported a violation
};

int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

/// Worker count for sweeps: EDGEPLAN_THREADS when set and positive,
/// otherwise the hardware concurrency.
unsigned worker_count();

}  // namespace edgeplan::cli
