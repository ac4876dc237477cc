#include "bimod/rotation.hpp"

#include <cmath>

namespace bimod {

MonotoneLift build_bound_map(const Lift& L, const CriticalData& C, Side side) {
    MonotoneLift M;
    M.base = L;
    M.side = side;
    if (side == Side::plus) {
        M.plateau = {C.c_plus, C.d_plus};
        M.plateau_value = L.eval(C.c_plus);
    } else {
        M.plateau = {C.d_minus, C.c_minus};
        M.plateau_value = L.eval(C.c_minus);
    }
    return M;
}

std::pair<double, double> rotation_number(const MonotoneLift& M,
                                          std::int64_t n_iter) {
    double y = 0.0, W = 0.0;
    for (std::int64_t i = 0; i < n_iter; ++i) {
        double z = M.eval(y);
        double k = std::floor(z);
        y = z - k;
        if (y >= 1.0) {  // rounding guard at the cell boundary
            y -= 1.0;
            k += 1.0;
        }
        W += k;
    }
    double n = static_cast<double>(n_iter);
    double total = W + y;
    return {(total - 1.0) / n, (total + 1.0) / n};
}

RotationInterval rotation_interval(const Lift& L, const CriticalData& C,
                                   double width) {
    auto n = static_cast<std::int64_t>(std::ceil(2.0 / width));
    RotationInterval R;
    R.n_iter = n;
    auto p = rotation_number(build_bound_map(L, C, Side::plus), n);
    auto m = rotation_number(build_bound_map(L, C, Side::minus), n);
    R.rho_plus_lo = p.first;
    R.rho_plus_hi = p.second;
    R.rho_minus_lo = m.first;
    R.rho_minus_hi = m.second;
    return R;
}

double monotone_preimage(const MonotoneLift& M, double v, double tol) {
    // one-period window [lo, lo+1] with eval(lo) <= v <= eval(lo+1)
    double s = std::ceil(M.eval(v) - v);
    double lo = v - s, hi = lo + 1.0;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (M.eval(mid) < v)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> plateau_iterate(const MonotoneLift& M, int i,
                                          double tol) {
    if (i >= 1) {
        double z = M.plateau_value;
        for (int t = 1; t < i; ++t) z = M.eval(z);
        return {z, z};
    }
    double lo = M.plateau.lo, hi = M.plateau.hi;
    for (int t = 0; t < -i; ++t) {
        lo = monotone_preimage(M, lo, tol);
        hi = monotone_preimage(M, hi, tol);
    }
    return {lo, hi};
}

bool order_witness(const MonotoneLift& M, double rho, int i, int j, int k,
                   double tol) {
    if (i == j) return true;  // both orderings reduce to 0 < k
    auto U = plateau_iterate(M, i);
    auto V = plateau_iterate(M, j);
    // compare as subsets of the line: U vs V + k
    bool lhs;
    if (U.second < V.first + k - tol)
        lhs = true;
    else if (V.second + k < U.first - tol)
        lhs = false;
    else
        throw PlateauCollision("plateau iterates are not separated");
    bool rhs = (i - j) * rho < static_cast<double>(k);
    return lhs == rhs;
}

}  // namespace bimod
