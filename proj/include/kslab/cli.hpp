#pragma once

#include <iosfwd>

namespace kslab {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;        // usage, parse, domain or format errors
inline constexpr int kExitContradicted = 2; // --expect did not hold

// Entry point of the `kslab` tool. Subcommands: construct, certify, kpos,
// scan, decompose, verify, suite. The environment variable KSLAB_SEED
// replaces the default seed; an explicit --seed wins over both.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kslab
