#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace flatflow::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kValidation = 2,
  kBudget = 3,
  kVertexHit = 4,
};

/// Runs one command line. Artifacts without --out go to `out`; the provenance
/// header and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flatflow::cli
