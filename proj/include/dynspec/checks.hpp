#pragma once

// Property suite over the numerical building blocks. Every check is
// deterministic (fixed internal seeds) and cheap enough for CI.

#include <functional>
#include <string>
#include <vector>

namespace dynspec {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

CheckResult check_moore_penrose();          // (a) 100 random matrices, 1e-8
CheckResult check_truncation();             // (b) ||A - trunc_gamma(A)|| < gamma
CheckResult check_geometric_phase_bound();  // (c) 99-point grid
CheckResult check_concentration();          // (d) exceedance <= delta, 1e4 trials
CheckResult check_weyl_lower_bound();       // (e) N = 16 q^2, q <= 10, all b
CheckResult check_weyl_structure();         // (f) buffer vs structured product, d = 3
CheckResult check_index_bijection();        // (g) d in {2, 3, 5}
CheckResult check_non_divisor_bound();      // (h) L, beta <= 8

/// All of the above, in order.
std::vector<CheckResult> run_property_suite();

}  // namespace dynspec
