#pragma once

#include <ostream>

namespace treedpp {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitConfigError = 2,
  kExitNumericError = 3,
};

// The treedpp command line. Artifacts go to --output (stdout when absent);
// human-readable summaries go to `out` when the artifact is a file and to
// `err` otherwise, so piped artifacts stay clean.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace treedpp
