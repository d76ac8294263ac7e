#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kinlaw {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::string detail;
};

// Runs the full acceptance suite, one line per criterion on `log`.
// Returns every result; the caller decides the exit status.
std::vector<CriterionResult> run_acceptance(std::ostream& log);

}  // namespace kinlaw
