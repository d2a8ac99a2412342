#pragma once

namespace gpx::cli {

/// Entry point for the gpx command line tool.
/// Exit codes: 0 success, 1 verification failure, 2 usage, 3 numerical regime.
int run(int argc, const char* const* argv);

} // namespace gpx::cli
