#pragma once

#include <iosfwd>

namespace trrsim::cli {

/// Entry point of the trrsim tool. Returns 0 on success, 1 on configuration
/// errors (bad arguments, malformed or missing files), 2 on runtime errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trrsim::cli
