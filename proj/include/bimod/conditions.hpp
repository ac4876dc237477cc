#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bimod/circle.hpp"
#include "bimod/continued_fraction.hpp"
#include "bimod/rotation.hpp"

namespace bimod {

// Summability data for the two critical orbits. Entry j pairs the level
// levels_*[j] = k with the term q_{2k} * d(f^{q_{2k-1}}(c+), c+) on the
// plus side and q_{2k+1} * d(f^{q_{2k}}(c-), c-) on the minus side,
// k = 1, 2, ...; partial_sums accumulate in the same order.
struct ConditionSeries {
    std::vector<int> levels_plus, levels_minus;
    std::vector<double> terms_plus, terms_minus;
    std::vector<double> partial_sums_plus, partial_sums_minus;
    // set to the first level whose return distance fell below ~10 eps;
    // terms stop just before it
    std::optional<int> exhausted_plus, exhausted_minus;
};

// Orbits run under the one-sided monotone bound maps; for irrational
// rotation numbers those orbits never meet the open plateaus, so they
// agree with the original map's critical orbits.
ConditionSeries condition_series(const Lift& L, const CriticalData& C,
                                 const ContinuedFraction& F_plus,
                                 const ContinuedFraction& F_minus,
                                 int k_cap);

struct GrowthReport {
    std::vector<int> levels;      // convergent indices used (odd or even)
    std::vector<double> log_d;    // |log d(f^{q_j}(c), c)| per level
    std::vector<double> ratios;   // successive |log d| ratios
    std::vector<double> band_lo, band_hi;
    bool lower_rate_ok = false;
    bool upper_rate_ok = false;
};

// Growth rate of |log d| along one-sided closest returns (odd levels for
// c+, even levels for c-), checked per step against
//   (1 + a/ell) * s  <=  ratio  <=  (1 + a (ell+1)/(ell-1)) / s
// where a is the partial quotient entering between the levels, ell the
// critical order on that side, and s in (0,1) the safety slack.
GrowthReport growth_ratio_check(const Lift& L, const CriticalData& C,
                                const ContinuedFraction& F, Side side,
                                int n_cap, double s = 0.5);

}  // namespace bimod
