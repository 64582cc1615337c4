#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace crl::cli {

/// Runs one command. `args` excludes the program name. Reports and
/// summaries go to `out`; failures are a single JSON line on `err`.
/// Returns 0 on success, 1 on a runtime error and 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Single-line JSON rendering of the active exception, for `err`.
std::string error_json(const std::exception& e);

}  // namespace crl::cli
