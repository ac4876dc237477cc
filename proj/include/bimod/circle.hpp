#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bimod/errors.hpp"

namespace bimod {

// Fractional part in [0,1). Guards against x - floor(x) rounding up to 1.0
// for tiny negative x.
inline double frac(double x) {
    double f = x - std::floor(x);
    return f < 1.0 ? f : 0.0;
}

// Circle distance d(x,y) = min_k |x - y + k|, always in [0, 1/2].
inline double circle_dist(double x, double y) {
    double t = frac(x - y);
    return t <= 0.5 ? t : 1.0 - t;
}

// Degree-one (or degree-d) lift of a circle endomorphism. eval and deriv
// take lift coordinates; eval(x+1) = eval(x) + degree holds to the last bit
// for the built-in families because they reduce the argument internally.
struct Lift {
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    // Optional extended-precision evaluator of the same lift. Long orbits
    // through near-critical points amplify rounding by the product of the
    // derivatives along the way; analytic families provide this so orbit
    // bisection stays meaningful past the double-precision ceiling. Null
    // for families that only exist in double (e.g. tabulated maps).
    std::function<long double(long double)> eval_ld;
    int degree = 1;
    std::map<std::string, double> family_params;
    std::string family_name;
    int precision_hint = 53;
};

// Critical structure of a bimodal lift. Representatives are normalized so
// that on the lift c_plus < c_minus < d_plus < c_plus + 1 and
// c_minus - 1 < d_minus < c_plus, matching the branch layout:
// increasing on [d_minus, c_plus], decreasing on [c_plus, c_minus],
// increasing on [c_minus, d_plus].
struct CriticalData {
    double c_plus = 0;    // local max of the lift, in [0,1)
    double c_minus = 0;   // local min, in (c_plus, c_plus + 1)
    double d_plus = 0;    // f(d_plus) = f(c_plus), in (c_minus, c_plus + 1)
    double d_minus = 0;   // f(d_minus) = f(c_minus), in (c_minus - 1, c_plus)
    double ell_plus = 2;  // criticality order at c_plus (> 1)
    double ell_minus = 2; // criticality order at c_minus (> 1)
};

// Closed arc on the circle given by ordered lift endpoints,
// lo <= hi <= lo + 1.
struct CircleInterval {
    double lo = 0;
    double hi = 0;

    double length() const { return hi - lo; }

    // Circle membership: reduce x into [lo, lo+1) and compare against hi.
    bool contains(double x, double tol = 0.0) const {
        double t = lo + frac(x - lo);
        return t <= hi + tol || t >= lo + 1.0 - tol;
    }

    // Lift representative of circle point x in [lo, lo+1).
    double lift_rep(double x) const { return lo + frac(x - lo); }
};

enum class MonoBranch { decreasing, increasing_left, increasing_right };

// ---- map families ----------------------------------------------------------

// x + a sin(2 pi x) + omega; bimodal iff a > 1/(2 pi).
Lift make_arnold(double a, double omega);

// x + rho. Not bimodal; used by rotation-number tests.
Lift make_rigid_rotation(double rho);

// Degree-two lift 2x; full-branch test harness for the partition and
// measure machinery.
Lift make_doubling();

// Monotone-piece cubic interpolation (Fritsch-Carlson limited tangents)
// through samples of one period; ys.back() must equal ys.front() + 1.
// ell_plus/ell_minus are caller assertions recorded in family_params.
Lift make_table(const std::vector<double>& xs, const std::vector<double>& ys,
                double ell_plus = 2.0, double ell_minus = 2.0);

// ---- operations -------------------------------------------------------------

// pi(eval(x~)) for any lift x~ of x; independent of the chosen lift.
inline double eval_circle(const Lift& L, double x) {
    return frac(L.eval(frac(x)));
}

// Locate c+-, d+- by bisection on derivative sign changes (exactly two per
// period required). tol bounds the bracket width for c+- and the value
// mismatch |f(d)-f(c)| for d+-.
CriticalData locate_critical_points(const Lift& L, double tol = 1e-12);

// Solve f~(y) = v on a monotone piece [b_lo, b_hi] of the lift by bisection
// (no winding adjustment; caller supplies compatible representatives).
double monotone_solve(const Lift& L, double v, double b_lo, double b_hi,
                      double tol = 1e-15);

// Conjugate point: y != x on the requested branch with f(y) = f(x) on the
// circle. Deterministic winding rule: smallest integer shift that lands the
// lift value of frac(x) inside the branch's value range and yields y != x.
double conjugate_point(const Lift& L, const CriticalData& C, double x,
                       MonoBranch branch, double tol = 1e-12);

// Same, locating the critical structure internally.
double conjugate_point(const Lift& L, double x, MonoBranch branch,
                       double tol = 1e-12);

struct SchwarzianReport {
    double min = 0;
    double max = 0;
    bool all_negative = false;
    int samples = 0;
};

// Sampled Schwarzian derivative via central differences of deriv (step h),
// excluding exclusion_radius-neighborhoods of critical points when the map
// has them (monotone lifts are sampled everywhere).
SchwarzianReport schwarzian_diagnostic(const Lift& L, int grid = 4096,
                                       double h = 1e-5,
                                       double exclusion_radius = 1e-3);

}  // namespace bimod
