#ifndef SIGCHANGE_TOOLS_CLI_HPP
#define SIGCHANGE_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace sigchange::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

/// Runs the command line `args` (args[0] is the program name). Data goes to `out`
/// unless --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// `v` with 17 significant digits in %g style ("nan", "inf", "-inf" for non-finite values).
std::string format_number(double v);

}  // namespace sigchange::cli

#endif  // SIGCHANGE_TOOLS_CLI_HPP
