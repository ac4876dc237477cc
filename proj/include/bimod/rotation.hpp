#pragma once

#include <cstdint>
#include <utility>

#include "bimod/circle.hpp"

namespace bimod {

enum class Side { plus, minus };

// Monotone (nondecreasing) degree-one lift obtained by flattening a bimodal
// lift across one critical interval at the critical value. Fundamental
// chart: [plateau.lo, plateau.lo + 1).
struct MonotoneLift {
    Lift base;
    Side side = Side::plus;
    CircleInterval plateau;      // [c+, d+] or [d-, c-] in lift coordinates
    double plateau_value = 0.0;  // f(c+) resp. f(c-)

    double eval(double x) const {
        double k = std::floor(x - plateau.lo);
        double u = x - k;
        if (u < plateau.lo) {
            k -= 1.0;
            u = x - k;
        } else if (u >= plateau.lo + 1.0) {
            k += 1.0;
            u = x - k;
        }
        double v = (u <= plateau.hi) ? plateau_value : base.eval(u);
        return v + k;
    }
};

struct RotationInterval {
    double rho_minus_lo = 0, rho_minus_hi = 0;
    double rho_plus_lo = 0, rho_plus_hi = 0;
    std::int64_t n_iter = 0;
};

// Flat-top the map across I+ = [c+, d+] (side plus) at f(c+), or across
// I- = [d-, c-] (side minus) at f(c-).
MonotoneLift build_bound_map(const Lift& L, const CriticalData& C, Side side);

// Orbit bracket from x = 0: [(F^n(0) - 1)/n, (F^n(0) + 1)/n]. Width 2/n
// always contains the rotation number of the monotone lift.
std::pair<double, double> rotation_number(const MonotoneLift& M,
                                          std::int64_t n_iter = 10'000'000);

// Both endpoint brackets at n_iter = ceil(2 / width).
RotationInterval rotation_interval(const Lift& L, const CriticalData& C,
                                   double width);

// Unique preimage of v under the monotone lift, by bisection on one period.
// If v is a plateau value the returned point is some point of that plateau.
double monotone_preimage(const MonotoneLift& M, double v, double tol = 1e-15);

// i-th image of the critical interval under the bound map: a point for
// i >= 1 (the plateau collapses), an interval for i <= 0 (preimages by
// monotone bisection).
std::pair<double, double> plateau_iterate(const MonotoneLift& M, int i,
                                          double tol = 1e-15);

// Checks one instance of the rotation-ordering equivalence:
// [ M^i(plateau) < M^j(plateau) + k ] agrees with [ (i-j)*rho < k ].
// Throws PlateauCollision if the two interval iterates are not disjoint
// within tol (rational rotation number or exhausted precision).
bool order_witness(const MonotoneLift& M, double rho, int i, int j, int k,
                   double tol = 1e-12);

}  // namespace bimod
