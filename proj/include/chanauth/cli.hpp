#pragma once

#include <iosfwd>

namespace chanauth::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitDataError = 2;

/// Entry point behind the chanauth binary. Subcommands: generate, ingest,
/// gridsearch, sweep, report. Returns a process exit code; diagnostics go
/// to err.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace chanauth::cli
