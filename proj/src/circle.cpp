#include "bimod/circle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace bimod {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr long double two_pi_l = 2.0L * std::numbers::pi_v<long double>;

// Split x into an integer part k and a remainder u in [x0, x0+1) such that
// x = k + u holds exactly (k and u are both representable and x - k is an
// exact subtraction for |x| < 2^52). Keeps eval(x+1) = eval(x) + 1 bit-exact.
struct Reduced {
    double k;
    double u;
};

Reduced reduce(double x, double x0 = 0.0) {
    double k = std::floor(x - x0);
    double u = x - k;
    if (u < x0) {
        k -= 1.0;
        u = x - k;
    } else if (u >= x0 + 1.0) {
        k += 1.0;
        u = x - k;
    }
    return {k, u};
}

struct TableData {
    std::vector<double> x, y, m;  // nodes, values, limited tangents
};

// Fritsch-Carlson monotone cubic tangents with periodic end conditions.
std::vector<double> pchip_tangents(const std::vector<double>& x,
                                   const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    auto limited = [](double hp, double hn, double dp, double dn) {
        if (dp * dn <= 0.0) return 0.0;
        double w1 = 2.0 * hn + hp;
        double w2 = hn + 2.0 * hp;
        return (w1 + w2) / (w1 / dp + w2 / dn);
    };
    for (std::size_t i = 1; i + 1 < n; ++i)
        m[i] = limited(h[i - 1], h[i], delta[i - 1], delta[i]);
    // one full period: wrap the last interval around to the first node
    m[0] = limited(h[n - 2], h[0], delta[n - 2], delta[0]);
    m[n - 1] = m[0];
    return m;
}

double hermite(const TableData& t, double u, bool want_deriv) {
    auto it = std::upper_bound(t.x.begin(), t.x.end(), u);
    std::size_t i = (it == t.x.begin()) ? 0 : (it - t.x.begin()) - 1;
    i = std::min(i, t.x.size() - 2);
    double h = t.x[i + 1] - t.x[i];
    double s = (u - t.x[i]) / h;
    double s2 = s * s, s3 = s2 * s;
    if (!want_deriv) {
        return t.y[i] * (2 * s3 - 3 * s2 + 1) + h * t.m[i] * (s3 - 2 * s2 + s) +
               t.y[i + 1] * (-2 * s3 + 3 * s2) + h * t.m[i + 1] * (s3 - s2);
    }
    return (t.y[i] * (6 * s2 - 6 * s) + t.y[i + 1] * (-6 * s2 + 6 * s)) / h +
           t.m[i] * (3 * s2 - 4 * s + 1) + t.m[i + 1] * (3 * s2 - 2 * s);
}

}  // namespace

Lift make_arnold(double a, double omega) {
    Lift L;
    L.eval = [a, omega](double x) {
        auto [k, u] = reduce(x);
        return k + u + a * std::sin(two_pi * u) + omega;
    };
    L.deriv = [a](double x) {
        auto [k, u] = reduce(x);
        (void)k;
        return 1.0 + two_pi * a * std::cos(two_pi * u);
    };
    L.eval_ld = [a, omega](long double x) -> long double {
        long double k = floorl(x);
        long double u = x - k;
        return k + u + (long double)a * sinl(two_pi_l * u) + (long double)omega;
    };
    L.degree = 1;
    L.family_name = "arnold";
    L.family_params = {{"a", a}, {"omega", omega},
                       {"ell_plus", 2.0}, {"ell_minus", 2.0}};
    return L;
}

Lift make_rigid_rotation(double rho) {
    Lift L;
    L.eval = [rho](double x) {
        auto [k, u] = reduce(x);
        return k + u + rho;
    };
    L.deriv = [](double) { return 1.0; };
    L.eval_ld = [rho](long double x) -> long double {
        return x + (long double)rho;
    };
    L.degree = 1;
    L.family_name = "rotation";
    L.family_params = {{"rho", rho}};
    return L;
}

Lift make_doubling() {
    Lift L;
    L.eval = [](double x) { return 2.0 * x; };
    L.deriv = [](double) { return 2.0; };
    L.eval_ld = [](long double x) -> long double { return 2.0L * x; };
    L.degree = 2;
    L.family_name = "doubling";
    return L;
}

Lift make_table(const std::vector<double>& xs, const std::vector<double>& ys,
                double ell_plus, double ell_minus) {
    if (xs.size() != ys.size() || xs.size() < 4)
        throw ConfigError("table family needs >= 4 matching nodes");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (!(xs[i] < xs[i + 1]))
            throw ConfigError("table nodes must be strictly increasing");
    if (std::abs(xs.back() - xs.front() - 1.0) > 1e-9)
        throw ConfigError("table nodes must span exactly one period");
    if (std::abs(ys.back() - ys.front() - 1.0) > 1e-9)
        throw ConfigError("table values must satisfy y(x0+1) = y(x0) + 1");

    auto data = std::make_shared<TableData>();
    data->x = xs;
    data->y = ys;
    data->m = pchip_tangents(xs, ys);
    double x0 = xs.front();

    Lift L;
    L.eval = [data, x0](double x) {
        auto [k, u] = reduce(x, x0);
        return k + hermite(*data, u, false);
    };
    L.deriv = [data, x0](double x) {
        auto [k, u] = reduce(x, x0);
        (void)k;
        return hermite(*data, u, true);
    };
    L.degree = 1;
    L.family_name = "table";
    L.family_params = {{"ell_plus", ell_plus}, {"ell_minus", ell_minus}};
    return L;
}

double monotone_solve(const Lift& L, double v, double b_lo, double b_hi,
                      double tol) {
    double va = L.eval(b_lo), vb = L.eval(b_hi);
    bool increasing = vb >= va;
    double vmin = std::min(va, vb), vmax = std::max(va, vb);
    if (v < vmin - 1e-10 || v > vmax + 1e-10)
        throw OutOfRange("target value not attained on the monotone piece");
    if (v <= vmin) return increasing ? b_lo : b_hi;
    if (v >= vmax) return increasing ? b_hi : b_lo;
    double lo = b_lo, hi = b_hi;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket at machine resolution
        if ((L.eval(mid) < v) == increasing)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

CriticalData locate_critical_points(const Lift& L, double tol) {
    if (L.degree != 1)
        throw NotBimodal("bimodal structure requires a degree-one lift");

    const int n = 4096;
    std::vector<double> d(n + 1);
    for (int i = 0; i <= n; ++i) d[i] = L.deriv(static_cast<double>(i) / n);

    // flat spot wider than a grid cell: derivative vanishes on an interval
    int zero_run = 0;
    for (int i = 0; i <= n; ++i) {
        zero_run = (std::abs(d[i]) < 1e-15) ? zero_run + 1 : 0;
        if (zero_run >= 2)
            throw DegenerateCritical("derivative vanishes on an interval");
    }

    // sign changes of the derivative over one period
    std::vector<std::pair<double, double>> brackets;  // (lo, hi) with sign flip
    for (int i = 0; i < n; ++i) {
        if (d[i] == 0.0) {  // isolated zero exactly on a grid node
            if (i > 0 && d[i - 1] * d[i + 1] < 0.0)
                brackets.emplace_back(static_cast<double>(i - 1) / n,
                                      static_cast<double>(i + 1) / n);
            continue;
        }
        if (d[i] * d[i + 1] < 0.0)
            brackets.emplace_back(static_cast<double>(i) / n,
                                  static_cast<double>(i + 1) / n);
    }
    if (brackets.size() != 2)
        throw NotBimodal("derivative must change sign exactly twice per period");

    double pts[2];
    bool is_max[2];
    for (int j = 0; j < 2; ++j) {
        auto [lo, hi] = brackets[j];
        double dlo = L.deriv(lo);
        while (hi - lo > tol) {
            double mid = 0.5 * (lo + hi);
            double dm = L.deriv(mid);
            if (dm == 0.0 || (dm > 0) == (dlo > 0))
                lo = mid, dlo = (dm == 0.0 ? dlo : dm);
            else
                hi = mid;
        }
        pts[j] = 0.5 * (lo + hi);
        is_max[j] = dlo > 0;  // derivative falls through zero at a local max
        // flat spot: derivative numerically zero beyond the bracket width
        if (std::abs(L.deriv(pts[j] - 2 * tol)) < 1e-15 &&
            std::abs(L.deriv(pts[j] + 2 * tol)) < 1e-15)
            throw DegenerateCritical("derivative vanishes on an interval");
    }
    if (is_max[0] == is_max[1])
        throw NotBimodal("critical points are not max/min alternating");

    CriticalData C;
    C.c_plus = is_max[0] ? pts[0] : pts[1];
    C.c_minus = is_max[0] ? pts[1] : pts[0];
    if (C.c_minus < C.c_plus) C.c_minus += 1.0;

    auto param = [&L](const char* key, double fallback) {
        auto it = L.family_params.find(key);
        return it == L.family_params.end() ? fallback : it->second;
    };
    C.ell_plus = param("ell_plus", 2.0);
    C.ell_minus = param("ell_minus", 2.0);

    // d+: same value as f(c+) on the increasing branch right of c-
    C.d_plus = monotone_solve(L, L.eval(C.c_plus), C.c_minus, C.c_plus + 1.0);
    // d-: same value as f(c-) on the increasing branch left of c+
    C.d_minus = monotone_solve(L, L.eval(C.c_minus), C.c_minus - 1.0, C.c_plus);
    return C;
}

double conjugate_point(const Lift& L, const CriticalData& C, double x,
                       MonoBranch branch, double tol) {
    double blo, bhi;
    switch (branch) {
        case MonoBranch::decreasing:
            blo = C.c_plus;
            bhi = C.c_minus;
            break;
        case MonoBranch::increasing_right:
            blo = C.c_minus;
            bhi = C.c_plus + 1.0;
            break;
        default:
            blo = C.c_minus - 1.0;
            bhi = C.c_plus;
            break;
    }
    double v0 = L.eval(frac(x));
    double va = L.eval(blo), vb = L.eval(bhi);
    double vmin = std::min(va, vb), vmax = std::max(va, vb);
    int m_lo = static_cast<int>(std::ceil(vmin - v0 - 1e-12));
    int m_hi = static_cast<int>(std::floor(vmax - v0 + 1e-12));
    for (int m = m_lo; m <= m_hi; ++m) {
        double y = monotone_solve(L, v0 + m, blo, bhi, tol * 1e-2);
        if (circle_dist(y, x) > 10 * tol) return y;
    }
    throw OutOfRange("value not attained on the requested branch");
}

double conjugate_point(const Lift& L, double x, MonoBranch branch, double tol) {
    return conjugate_point(L, locate_critical_points(L), x, branch, tol);
}

SchwarzianReport schwarzian_diagnostic(const Lift& L, int grid, double h,
                                       double exclusion_radius) {
    bool have_crit = false;
    CriticalData C;
    try {
        C = locate_critical_points(L);
        have_crit = true;
    } catch (const Error&) {
        // monotone or multimodal lift: sample everywhere
    }

    SchwarzianReport r;
    r.min = std::numeric_limits<double>::infinity();
    r.max = -r.min;
    for (int i = 0; i < grid; ++i) {
        double u = (i + 0.5) / grid;
        if (have_crit && (circle_dist(u, C.c_plus) < exclusion_radius ||
                          circle_dist(u, C.c_minus) < exclusion_radius))
            continue;
        double d0 = L.deriv(u);
        double dp = L.deriv(u + h), dm = L.deriv(u - h);
        double f2 = (dp - dm) / (2 * h);
        double f3 = (dp - 2 * d0 + dm) / (h * h);
        double s = f3 / d0 - 1.5 * (f2 / d0) * (f2 / d0);
        r.min = std::min(r.min, s);
        r.max = std::max(r.max, s);
        ++r.samples;
    }
    r.all_negative = r.samples > 0 && r.max < 0.0;
    return r;
}

}  // namespace bimod
