#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qlink::cli {

/// Runs one command line (argv[0] is the program name). Returns the process
/// exit code: 0 success, 1 configuration error, 2 model-domain error.
int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace qlink::cli
