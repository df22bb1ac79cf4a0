#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace robloc {

// Entry point of the `robloc` tool. Subcommands: solve, sweep, trace,
// prox-check. Returns the process exit code; failures print one line of the
// form "error: <category>: <message>" to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace robloc
