#pragma once

#include <iosfwd>

namespace kernsupp {

/// Entry point of the `kernsupp` command-line tool.
///
/// Subcommands: train, score, eval, sweep, synth, verify-bounds. Returns the
/// process exit code: 0 success, 2 usage error, 3 data error, 4 numeric
/// failure. Tables go to --out (or `out` when none is given); diagnostics go
/// to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kernsupp
