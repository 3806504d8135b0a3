#pragma once

namespace cli {

/// Entry point shared by the executable and the tests. Returns the process
/// exit status: 0 clean, 1 assertion violation, 2 configuration error.
int run_cli(int argc, const char* const* argv);

}  // namespace cli
