#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trendboot::cli {

/// Runs the command line `args` (without the program name). Tabular output
/// destined for "-" goes to `out`, diagnostics to `err`. Returns the process
/// exit status: 0 success, 1 runtime error, 2 usage or configuration error,
/// 3 grid analysis finished with failed cells.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trendboot::cli
