#pragma once

namespace coloke::cli {

// Command-line front end. Subcommands: simulate, train, benchmark, spectrum,
// inspect. Returns 0 on success, 1 on usage/config errors, 2 on runtime
// failures. Every run prints its resolved seed.
int run_cli(int argc, const char* const* argv);

}  // namespace coloke::cli
