#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace areacfd::service {

/// Runs one command line (without the program name). Returns the process
/// exit status: 0 on success, 1 for failures reported as
/// "error: <code>: <message>", 2 for usage errors.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace areacfd::service
