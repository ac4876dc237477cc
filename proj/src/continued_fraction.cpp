#include "bimod/continued_fraction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "bimod/errors.hpp"

namespace bimod {

namespace {

// floor(1/x) for exact rational x in (0,1)
big_int inv_floor(const big_rat& x) {
    return big_int(boost::multiprecision::denominator(x) /
                   boost::multiprecision::numerator(x));
}

void push_convergent(ContinuedFraction& F, const big_int& a) {
    const auto k = F.p.size();
    // p_{-1}=1, q_{-1}=0, p_0=0, q_0=1
    big_int pk_2 = (k >= 2) ? F.p[k - 2] : big_int(1);
    big_int qk_2 = (k >= 2) ? F.q[k - 2] : big_int(0);
    if (k == 0) {
        F.p.push_back(0);
        F.q.push_back(1);
        return;
    }
    F.p.push_back(a * F.p[k - 1] + pk_2);
    F.q.push_back(a * F.q[k - 1] + qk_2);
}

// log2 of a positive big integer, safe far beyond double range
double log2_big(const big_int& v) {
    const auto e = boost::multiprecision::msb(v);
    if (e <= 52) return std::log2(static_cast<double>(v));
    big_int top = v >> (e - 52);
    return std::log2(static_cast<double>(top)) +
           static_cast<double>(e - 52);
}

}  // namespace

ContinuedFraction cf_expand(double lo, double hi) {
    if (!(lo > 0.0) || !(hi < 1.0) || !(lo <= hi))
        throw OutOfRange("cf_expand: bracket must satisfy 0 < lo <= hi < 1");
    ContinuedFraction F;
    F.bracket_lo = lo;
    F.bracket_hi = hi;
    push_convergent(F, 0);  // p_0/q_0 = 0/1

    big_rat x(lo), y(hi);  // exact binary values of the endpoints
    while (true) {
        if (x == 0 || y == 0)
            throw RationalDetected(
                "cf_expand: an endpoint expansion terminated before the "
                "bracket endpoints disagreed; tighten the bracket");
        const big_int ax = inv_floor(x);
        const big_int ay = inv_floor(y);
        if (ax != ay) break;
        F.a.push_back(ax);
        push_convergent(F, ax);
        x = big_rat(1) / x - ax;
        y = big_rat(1) / y - ay;
    }
    F.k_max = static_cast<int>(F.a.size());
    return F;
}

ContinuedFraction cf_from_quotients(const std::vector<big_int>& quotients) {
    ContinuedFraction F;
    push_convergent(F, 0);
    for (const auto& a : quotients) {
        if (a < 1)
            throw ConfigError("cf_from_quotients: quotients must be >= 1");
        F.a.push_back(a);
        push_convergent(F, a);
    }
    F.k_max = static_cast<int>(F.a.size());
    return F;
}

std::vector<std::int64_t> closest_return_oracle(const big_rat& rho,
                                                std::int64_t n_max) {
    if (rho <= 0 || rho >= 1)
        throw OutOfRange("closest_return_oracle: rho must lie in (0,1)");
    std::vector<std::int64_t> times;
    big_rat r = 0;          // n*rho mod 1, exact
    big_rat best = 1;       // current record distance, starts above any d
    const big_rat half(1, 2);
    for (std::int64_t n = 1; n <= n_max; ++n) {
        r += rho;
        if (r >= 1) r -= 1;
        big_rat d = (r <= half) ? r : big_rat(1) - r;
        if (d < best) {
            best = d;
            times.push_back(n);
            if (best == 0) break;  // exact return: nothing can beat it
        }
    }
    return times;
}

std::vector<std::vector<big_int>> one_sided_return_times(
    const ContinuedFraction& F, Approach side, int k_lo, int k_hi) {
    if (k_lo < 0 || k_hi < k_lo)
        throw OutOfRange("one_sided_return_times: bad level range");
    // q_j with the q_{-1}=0 sentinel; a_j is 1-indexed into F.a
    auto qat = [&](int j) -> big_int {
        if (j < 0) return 0;
        if (j >= static_cast<int>(F.q.size()))
            throw OutOfRange("one_sided_return_times: level " +
                             std::to_string(j) + " beyond certified depth");
        return F.q[j];
    };
    auto aat = [&](int j) -> big_int {
        if (j < 1 || j > F.k_max)
            throw OutOfRange("one_sided_return_times: quotient a_" +
                             std::to_string(j) + " not certified");
        return F.a[j - 1];
    };
    std::vector<std::vector<big_int>> out;
    for (int k = k_lo; k <= k_hi; ++k) {
        std::vector<big_int> level;
        if (side == Approach::left) {
            const big_int base = qat(2 * k - 1), step = qat(2 * k);
            const big_int amax = aat(2 * k + 1);
            for (big_int l = 1; l <= amax; ++l)
                level.push_back(base + l * step);
        } else {
            const big_int base = qat(2 * k), step = qat(2 * k + 1);
            const big_int amax = aat(2 * k + 2);
            for (big_int l = 0; l < amax; ++l)
                level.push_back(base + l * step);
        }
        out.push_back(std::move(level));
    }
    return out;
}

DiophantineReport diophantine_margin(const ContinuedFraction& F,
                                     double beta) {
    if (!(beta > 0))
        throw ConfigError("diophantine_margin: beta must be positive");
    DiophantineReport R;
    const int m = static_cast<int>(F.q.size()) - 1;  // ratio count
    if (m < 1) {
        R.margin_ok = false;
        return R;
    }
    std::vector<double> excess(m);  // log2( q_{k+1} / q_k^{1+beta} )
    for (int k = 0; k < m; ++k)
        excess[k] = log2_big(F.q[k + 1]) - (1.0 + beta) * log2_big(F.q[k]);
    const int fit = (m + 1) / 2;
    double c_log = excess[0];
    for (int k = 1; k < fit; ++k) c_log = std::max(c_log, excess[k]);
    R.c_fit = std::exp2(c_log);
    for (int k = fit; k < m; ++k)
        if (excess[k] > c_log + 1e-12) R.violations.push_back(k);
    R.margin_ok = R.violations.empty();
    return R;
}

}  // namespace bimod
