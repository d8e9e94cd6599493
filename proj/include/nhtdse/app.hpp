#pragma once

namespace nhtdse {

/// Entry point of the `nhtdse` tool. Exit codes: 0 success, 2 invalid config
/// or command line (nothing written), 3 numerical failure (summary.json only,
/// carrying the error name), 1 anything unexpected.
int run_cli(int argc, char** argv);

}  // namespace nhtdse
