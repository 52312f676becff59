#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ucover {

/// Entry point of the `ucover` tool. Data goes to `out` (or to files under
/// --out-dir), errors go to `err` as one JSON object. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ucover
