#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qmm {

/// Runs one CLI invocation; `args` excludes the program name. Returns 0 on
/// success, 1 on a usage error, 2 when the library rejects the request.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a..b" is an inclusive integer range; otherwise a comma-separated list.
std::vector<int> parse_n_list(const std::string& text);

}  // namespace qmm
