#pragma once

// Acceptance suite shared by `cqi selftest` and the ctest binary.
// The report is byte-stable: it carries measured values and verdicts but no
// timings (those go to the optional progress stream).

#include <ostream>
#include <string>
#include <vector>

namespace cqi::acceptance {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string measured;
    std::string expected;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

struct Options {
    bool quick = false;                ///< closed-form criteria only
    std::ostream* progress = nullptr;  ///< per-criterion timing lines
};

std::vector<CriterionResult> run(const Options& opts = {});

/// One line per criterion: "PASS|FAIL <id> <title> | measured: ... | expected: ...".
std::string render(const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace cqi::acceptance
