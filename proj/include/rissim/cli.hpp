#ifndef RISSIM_CLI_HPP
#define RISSIM_CLI_HPP

#include <ostream>

namespace rissim::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;  // parse/validation/usage errors
inline constexpr int kExitIo = 3;
inline constexpr int kExitMismatch = 4;  // compare across scenes or receiver sets

/// Entry point shared by the `rissim` binary and the tests. Subcommands:
/// `heatmap`, `run`, `compare`. Errors are reported on `err` as a single
/// `ERROR <code>: <message>` line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rissim::cli

#endif  // RISSIM_CLI_HPP
