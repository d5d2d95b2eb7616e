#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace civ::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeError = 1, kUsageError = 2 };

/// Runs one command line. Primary payload goes to `out`; diagnostics, the
/// manifest fallback and error objects go to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace civ::cli
