#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bimod {

using big_int = boost::multiprecision::cpp_int;
using big_rat = boost::multiprecision::cpp_rational;

// Continued fraction of a number in (0,1), certified from a bracket.
// Quotient list starts at a_1 (the integer part is the caller's business);
// convergents use q_{-1}=0, q_0=1, q_k = a_k q_{k-1} + q_{k-2} and
// p_{-1}=1, p_0=0.
struct ContinuedFraction {
    std::vector<big_int> a;     // certified partial quotients a_1..a_kmax
    std::vector<big_int> p, q;  // convergents p_0..p_kmax, q_0..q_kmax
    double bracket_lo = 0, bracket_hi = 0;
    int k_max = 0;  // number of certified quotients == a.size()
};

// Two-endpoint Gauss expansion: emits quotients while both (exact) endpoint
// expansions agree. Throws RationalDetected if an endpoint terminates before
// the first disagreement (bracket too wide or centered on a short rational).
ContinuedFraction cf_expand(double lo, double hi);

// Assemble convergents for a synthetic quotient sequence (tests, Liouville
// patterns). No bracket attached.
ContinuedFraction cf_from_quotients(const std::vector<big_int>& quotients);

// Brute-force record minima of d(n*rho mod 1, 0), n = 1..n_max; exact
// rational arithmetic so ties behave deterministically.
std::vector<std::int64_t> closest_return_oracle(const big_rat& rho,
                                                std::int64_t n_max);

// Which side of the base point an orbit approaches from.
enum class Approach { left, right };

// Arithmetic progressions of one-sided closest returns at level k:
// left:  q_{2k-1} + l q_{2k},   0 <  l <= a_{2k+1}
// right: q_{2k}   + l q_{2k+1}, 0 <= l <  a_{2k+2}
// Returns one list per k in [k_lo, k_hi]; requires the quotients involved
// to be certified.
std::vector<std::vector<big_int>> one_sided_return_times(
    const ContinuedFraction& F, Approach side, int k_lo, int k_hi);

struct DiophantineReport {
    std::vector<int> violations;  // k in the test half with excess growth
    bool margin_ok = false;
    double c_fit = 0.0;  // max q_{k+1}/q_k^{1+beta} over the fit half
};

// Fits C on the first half of the certified range, then flags k in the
// second half with q_{k+1} > C q_k^{1+beta}. Works in log2 so synthetic
// towers of quotients cannot overflow.
DiophantineReport diophantine_margin(const ContinuedFraction& F, double beta);

}  // namespace bimod
