#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace frad::cli {

/// Exit codes of the frad tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kSchema = 3, kNumeric = 4 };

/// Runs the tool with argv-style arguments (args[0] is the program name).
/// Diagnostics go to `err`, normal output (help text, predictions) to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace frad::cli
