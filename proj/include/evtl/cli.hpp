#pragma once

// The `evtl` command-line tool, callable in-process for tests.

#include <iosfwd>
#include <string>
#include <vector>

namespace evtl {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitParse = 3, kExitNumeric = 4 };

/// `args` excludes the program name. Results go to `out` unless an output
/// path is given; diagnostics and warnings go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace evtl
