#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pexstab::selftest {

struct Check {
    std::string id;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct Options {
    bool invariants = true;
    bool acceptance = true;
    // Prints each check as soon as it finishes.
    std::function<void(const Check&)> on_check;
};

struct Summary {
    std::vector<Check> checks;
    double seconds = 0.0;
    bool passed() const;
};

Summary run_selftest(const Options& options = {});

// Stand-alone pieces, also used by the acceptance binary and tests.
std::vector<Check> invariant_checks();
std::vector<Check> acceptance_checks();

// Triangle inequality search for the beta-norm; returns true if a violating
// pair was found among seeded random vectors.
bool beta_triangle_counterexample(double beta, unsigned seed = 1);

}  // namespace pexstab::selftest
