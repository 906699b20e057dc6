#pragma once

#include <iosfwd>

namespace salmanip::tools {

/// Entry point of the `salmanip` command. Returns 0 on success, 1 on input
/// errors (bad flags, unreadable files, no data) and 2 on runtime failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace salmanip::tools
