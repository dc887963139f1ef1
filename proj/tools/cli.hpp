#pragma once

#include <string>
#include <vector>

namespace topamp::cli {

// Runs one subcommand; returns the process exit code (0 ok, 1 computational failure, 2 bad arguments).
int run(int argc, const char* const* argv);

}  // namespace topamp::cli
