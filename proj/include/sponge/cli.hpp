#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace sponge::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,     // schema or constraint violation, bad parameter
    kNonConvergence = 2,
    kIoError = 3,
};

/// Settings shared by every subcommand; echoed into each output.
struct RunConfig {
    std::string subcommand;
    std::string spec_path;
    std::string out_path;  // empty: standard output
    double tol = 0;        // 0: the subcommand's default
    int restarts = 16;
    std::uint64_t seed = 42;
    int depth = 6;
    int grid = 0;          // 0: the subcommand's default
    int threads = 1;
    bool oracle = false;
};

/// Threads from SPONGE_DIM_THREADS, else the available parallelism.
int default_threads();

/// Entry point of the command-line tool. Data goes to `out` (or --out),
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sponge::cli
