#include "bimod/conditions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bimod/errors.hpp"

namespace bimod {

namespace {

constexpr double kDistFloor = 10.0 * std::numeric_limits<double>::epsilon();
constexpr std::int64_t kTimeCap = 100'000'000;

std::int64_t to_time(const big_int& q) {
    if (q > kTimeCap)
        throw OutOfRange("return time " + q.str() +
                         " exceeds the orbit budget");
    return q.convert_to<std::int64_t>();
}

// circle distances d(f^t(c), c) for a sorted list of times; the orbit is
// renormalized into [c, c+1) every step so precision does not degrade with
// the winding
std::vector<double> orbit_distances(const MonotoneLift& M, double c,
                                    const std::vector<std::int64_t>& times) {
    std::vector<double> out(times.size());
    if (times.empty()) return out;
    double u = c;
    std::size_t idx = 0;
    const std::int64_t n_max = times.back();
    for (std::int64_t n = 1; n <= n_max; ++n) {
        const double v = M.eval(u);
        u = v - std::floor(v - c);
        if (u - c >= 1.0) u -= 1.0;
        while (idx < times.size() && times[idx] == n) {
            out[idx] = circle_dist(u, c);
            ++idx;
        }
    }
    return out;
}

}  // namespace

ConditionSeries condition_series(const Lift& L, const CriticalData& C,
                                 const ContinuedFraction& F_plus,
                                 const ContinuedFraction& F_minus,
                                 int k_cap) {
    if (k_cap < 1) throw ConfigError("condition_series: k_cap must be >= 1");
    ConditionSeries S;

    const MonotoneLift Mp = build_bound_map(L, C, Side::plus);
    const MonotoneLift Mm = build_bound_map(L, C, Side::minus);

    // plus side: term_k = q_{2k} d(f^{q_{2k-1}}(c+), c+)
    {
        std::vector<std::int64_t> times;
        std::vector<int> ks;
        for (int k = 1; k <= k_cap && 2 * k <= F_plus.k_max; ++k) {
            times.push_back(to_time(F_plus.q[2 * k - 1]));
            ks.push_back(k);
        }
        const auto d = orbit_distances(Mp, C.c_plus, times);
        double sum = 0.0;
        for (std::size_t j = 0; j < ks.size(); ++j) {
            if (d[j] < kDistFloor) {
                S.exhausted_plus = ks[j];
                break;
            }
            const double w = F_plus.q[2 * ks[j]].convert_to<double>();
            S.levels_plus.push_back(ks[j]);
            S.terms_plus.push_back(w * d[j]);
            sum += w * d[j];
            S.partial_sums_plus.push_back(sum);
        }
    }

    // minus side: term_k = q_{2k+1} d(f^{q_{2k}}(c-), c-)
    {
        std::vector<std::int64_t> times;
        std::vector<int> ks;
        for (int k = 1; k <= k_cap && 2 * k + 1 <= F_minus.k_max; ++k) {
            times.push_back(to_time(F_minus.q[2 * k]));
            ks.push_back(k);
        }
        const auto d = orbit_distances(Mm, C.c_minus, times);
        double sum = 0.0;
        for (std::size_t j = 0; j < ks.size(); ++j) {
            if (d[j] < kDistFloor) {
                S.exhausted_minus = ks[j];
                break;
            }
            const double w = F_minus.q[2 * ks[j] + 1].convert_to<double>();
            S.levels_minus.push_back(ks[j]);
            S.terms_minus.push_back(w * d[j]);
            sum += w * d[j];
            S.partial_sums_minus.push_back(sum);
        }
    }
    return S;
}

GrowthReport growth_ratio_check(const Lift& L, const CriticalData& C,
                                const ContinuedFraction& F, Side side,
                                int n_cap, double s) {
    if (!(s > 0.0 && s < 1.0))
        throw ConfigError("growth_ratio_check: slack s must be in (0,1)");
    if (n_cap < 0)
        throw ConfigError("growth_ratio_check: n_cap must be >= 0");

    const MonotoneLift M = build_bound_map(L, C, side);
    const double c = (side == Side::plus) ? C.c_plus : C.c_minus;
    const double ell = (side == Side::plus) ? C.ell_plus : C.ell_minus;

    GrowthReport R;
    std::vector<std::int64_t> times;
    for (int n = 0; n <= n_cap; ++n) {
        const int j = (side == Side::plus) ? 2 * n + 1 : 2 * n + 2;
        if (j > F.k_max) break;
        R.levels.push_back(j);
        times.push_back(to_time(F.q[j]));
    }
    const auto d = orbit_distances(M, c, times);
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] < kDistFloor) {
            R.levels.resize(i);
            break;
        }
        R.log_d.push_back(std::abs(std::log(d[i])));
    }
    R.levels.resize(R.log_d.size());

    R.lower_rate_ok = true;
    R.upper_rate_ok = true;
    for (std::size_t i = 1; i < R.log_d.size(); ++i) {
        const double a = F.a[R.levels[i] - 1].convert_to<double>();
        const double r = R.log_d[i] / R.log_d[i - 1];
        R.ratios.push_back(r);
        R.band_lo.push_back((1.0 + a / ell) * s);
        R.band_hi.push_back((1.0 + a * (ell + 1.0) / (ell - 1.0)) / s);
        if (r < R.band_lo.back()) R.lower_rate_ok = false;
        if (r > R.band_hi.back()) R.upper_rate_ok = false;
    }
    return R;
}

}  // namespace bimod
