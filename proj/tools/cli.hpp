#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fsk::cli {

/// Exit codes: 0 success, 1 a check failed (or the run itself failed),
/// 2 usage or configuration error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fsk::cli
