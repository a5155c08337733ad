#pragma once

// One-shot battery of the platform's theory goldens: interference visibilities,
// beam-splitter expansion amplitudes, gate output, CHSH bound, and the full
// rate budget. Each check carries its expected value and tolerance so a
// mismatch prints expected vs got.

#include <iosfwd>
#include <string>
#include <vector>

#include "vvsim/budget.hpp"

namespace vvsim {

struct GoldenCheck {
    std::string name;
    double expected;
    double got;
    double tolerance;
    bool pass;
};

struct ReferenceConstant {
    std::string name;
    double value;  // reported experimental values, kept for comparison output
};

struct ReferenceReport {
    std::vector<GoldenCheck> checks;
    std::vector<ReferenceConstant> constants;
    bool all_pass;
};

ReferenceReport reference_suite(const EfficiencyChain& chain = EfficiencyChain{});

std::string reference_report_json(const ReferenceReport& report);
void print_reference_report(const ReferenceReport& report, std::ostream& out);

}  // namespace vvsim
