#pragma once

#include <cstdint>
#include <string>

namespace qspan {

// Resolved invocation state. Every command embeds this (fully resolved, with
// defaults filled in) in its output so a run can be reproduced from the
// artifact alone.
struct RunConfig {
    std::string command;
    std::string input;              // circuit, group, or task file
    int split = -1;                 // data-register width for group inputs
    std::string ancilla = "auto";   // stab:<file> | T^<k> | dense:<file> | generic | auto
    std::string out;                // output path, empty writes to stdout
    std::string format = "json";   // json | csv | text
    bool oracle = false;
    std::uint64_t seed = 1;
    int dense_cap = 10;             // refuse dense work above 2^cap dimensions
    std::string shard;              // "k/K" override for search tasks
    std::string filter;             // examples substring filter
    int n = 0;
    int t = -1;                     // bounds: -1 means "no t given"
};

// Entry point used by the binary; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace qspan
