#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xdcc::cli {

/// Runs the command line `args` (args[0] is the program name). Output goes to
/// `out`, diagnostics to `err` with an `error[<kind>]: ` prefix. Returns the
/// process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace xdcc::cli
