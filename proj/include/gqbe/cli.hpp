#pragma once

#include <iosfwd>

namespace gqbe {

// Subcommands: load, query, eval, serve. Returns 0 on success, 2 on usage
// errors and 1 on runtime failures; messages go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gqbe
