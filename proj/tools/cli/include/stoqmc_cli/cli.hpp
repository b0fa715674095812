#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stoqmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitDiagnostic = 3;
inline constexpr int kExitInternal = 4;

/// Runs one command line (args[0] is the program name). The JSON report
/// goes to `out` (or to --output), log lines to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stoqmc::cli
