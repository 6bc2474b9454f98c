#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mhl::cli {

/// Runs one CLI invocation. Exit codes: 0 = success / claim holds,
/// 1 = inequality violated or verdict diverges, 2 = usage or validation
/// error. Machine-readable payload (JSON, or CSV when requested) goes to
/// out; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mhl::cli
