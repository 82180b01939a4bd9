#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mkal::cli {

/// Runs the benchmark command line. `args` excludes the program name.
/// Returns the process exit code; failures print a JSON error object to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mkal::cli
