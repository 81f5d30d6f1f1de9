#pragma once

#include <functional>
#include <string>
#include <vector>

namespace qspan {

// One worked configuration with a frozen expected result. `run` recomputes the
// observed value from scratch; `pass` means the two sides agree. Exact-integer
// cases compare strings verbatim, numeric cases fold their tolerance into the
// check and report the measured numbers in `observed`.
struct ExampleOutcome {
    std::string name;
    bool pass = false;
    std::string expected;
    std::string observed;
};

struct ExampleCase {
    std::string name;     // stable id, used for substring filtering
    std::string summary;  // one line of context for listings
    std::function<ExampleOutcome()> run;
};

const std::vector<ExampleCase>& example_catalog();

// Run every case whose name contains `filter` (empty runs all of them).
std::vector<ExampleOutcome> run_examples(const std::string& filter = std::string());

}  // namespace qspan
