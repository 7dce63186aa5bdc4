#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tiltkde {

//! Parses argv and dispatches to the subcommand. Returns the process exit
//! code: 0 success, 2 flag-validation failure, 1 runtime error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

} // namespace tiltkde
