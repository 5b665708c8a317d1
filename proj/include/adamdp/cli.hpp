#pragma once

#include <iosfwd>

namespace adamdp {

/// Command-line front end. Exit codes: 0 success, 1 I/O failure,
/// 2 validation/usage failure, 3 enumeration guard exceeded.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace adamdp
