#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace twistk {

// Runs one subcommand (kgroup, flow, heat, primitive, character, suspend-check).
// Returns 0 when every check passes, 1 when a check fails, 2 on invalid input.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twistk
