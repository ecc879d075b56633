#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prach {

// Exit codes: 0 ok, 2 config, 3 io, 4 data, 5 numeric, 1 anything else.
// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prach
