#pragma once

#include <vector>

namespace smnp {

/// Entry point of the `smnp` tool. Returns the process exit status; errors
/// are reported as one line on stderr.
int cli_main(int argc, const char* const* argv);

/// Parses "lo:hi:step" into an inclusive grid.
std::vector<double> parse_grid(const char* text);

}  // namespace smnp
