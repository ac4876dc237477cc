#include <cmath>
#include <random>

#include "bimod/rotation.hpp"
#include "desk_params.hpp"
#include "doctest.h"

using namespace bimod;

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// wrap a monotone lift as a degenerate-plateau bound map
MonotoneLift wrap_monotone(const Lift& L) {
    MonotoneLift M;
    M.base = L;
    M.side = Side::plus;
    M.plateau = {0.0, 0.0};
    M.plateau_value = L.eval(0.0);
    return M;
}

}  // namespace

TEST_CASE("bound map construction") {
    Lift L = make_arnold(0.25, 0.0);
    CriticalData C = locate_critical_points(L);
    MonotoneLift P = build_bound_map(L, C, Side::plus);
    MonotoneLift M = build_bound_map(L, C, Side::minus);

    SUBCASE("plateau values") {
        CHECK(P.plateau_value == L.eval(C.c_plus));
        CHECK(M.plateau_value == L.eval(C.c_minus));
        double mid_p = 0.5 * (C.c_plus + C.d_plus);
        CHECK(P.eval(mid_p) == P.plateau_value);
        double mid_m = 0.5 * (C.d_minus + C.c_minus);
        CHECK(M.eval(mid_m) == M.plateau_value);
    }
    SUBCASE("agrees with the base map off the plateau") {
        CHECK(P.eval(C.d_plus + 0.01) == L.eval(C.d_plus + 0.01));
        CHECK(P.eval(C.c_plus - 0.01) == L.eval(C.c_plus - 0.01));
        CHECK(M.eval(C.c_minus + 0.01) == L.eval(C.c_minus + 0.01));
    }
    SUBCASE("nondecreasing") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> U(-2.0, 2.0);
        int bad = 0;
        for (int i = 0; i < 10000; ++i) {
            double x = U(rng), y = U(rng);
            if (x > y) std::swap(x, y);
            if (P.eval(y) < P.eval(x) - 1e-12) ++bad;
            if (M.eval(y) < M.eval(x) - 1e-12) ++bad;
        }
        CHECK(bad == 0);
    }
    SUBCASE("degree-one identity survives flattening") {
        std::mt19937_64 rng(32);
        std::uniform_real_distribution<double> U(-5.0, 5.0);
        int bad = 0;
        for (int i = 0; i < 2000; ++i) {
            double x = U(rng);
            if (std::abs(P.eval(x + 1.0) - P.eval(x) - 1.0) > 1e-12) ++bad;
            if (std::abs(M.eval(x + 1.0) - M.eval(x) - 1.0) > 1e-12) ++bad;
        }
        CHECK(bad == 0);
    }
}

TEST_CASE("rotation number brackets") {
    SUBCASE("rigid rotations recover the angle") {
        for (double rho : {0.381966011250105, 0.107456, -0.25, 0.618033988}) {
            auto [lo, hi] = rotation_number(wrap_monotone(make_rigid_rotation(rho)),
                                            1'000'000);
            CHECK(hi - lo <= 2e-6 + 1e-15);
            CHECK(lo <= rho);
            CHECK(rho <= hi);
        }
    }
    SUBCASE("steep family, frozen oracle anchors") {
        // independently computed long-orbit runs: the upper number locks at
        // the integer 1 and the lower at -2/5; both brackets must contain
        // the locked value
        Lift L = make_arnold(1.0, 0.2);
        CriticalData C = locate_critical_points(L);
        auto [plo, phi] = rotation_number(build_bound_map(L, C, Side::plus),
                                          10'000'000);
        CHECK(phi - plo <= 2e-7 + 1e-15);
        CHECK(plo <= 1.0);
        CHECK(1.0 <= phi);
        auto [mlo, mhi] = rotation_number(build_bound_map(L, C, Side::minus),
                                          10'000'000);
        CHECK(mlo <= -0.4);
        CHECK(-0.4 <= mhi);
    }
}

TEST_CASE("rotation interval") {
    SUBCASE("symmetric at zero offset") {
        Lift L = make_arnold(0.25, 0.0);
        CriticalData C = locate_critical_points(L);
        RotationInterval R = rotation_interval(L, C, 1e-5);
        double pm = 0.5 * (R.rho_plus_lo + R.rho_plus_hi);
        double mm = 0.5 * (R.rho_minus_lo + R.rho_minus_hi);
        CHECK(close(pm, -mm, 2e-5));
        CHECK(R.n_iter == 200000);
    }
    SUBCASE("lower never exceeds upper") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> Ua(0.17, 1.2), Uw(0.0, 1.0);
        for (int t = 0; t < 20; ++t) {
            Lift L = make_arnold(Ua(rng), Uw(rng));
            RotationInterval R = rotation_interval(L, locate_critical_points(L),
                                                   1e-4);
            CHECK(R.rho_minus_hi <= R.rho_plus_lo + 2e-4);
        }
    }
    SUBCASE("steep family separates the endpoints strictly") {
        Lift L = make_arnold(1.0, 0.2);
        RotationInterval R = rotation_interval(L, locate_critical_points(L),
                                               1e-6);
        CHECK(R.rho_plus_lo - R.rho_minus_hi > 0.5);  // ~1.4 apart
    }
    SUBCASE("monotone in the offset") {
        double prev_hi = -10.0;
        for (int t = 0; t < 10; ++t) {
            double w = 0.05 + 0.09 * t;
            Lift L = make_arnold(0.3, w);
            RotationInterval R = rotation_interval(L, locate_critical_points(L),
                                                   1e-4);
            // brackets may touch but never regress past the previous one
            CHECK(R.rho_plus_hi >= prev_hi - 2e-4);
            prev_hi = std::max(prev_hi, R.rho_plus_hi);
        }
    }
    SUBCASE("halving the width keeps brackets consistent") {
        Lift L = make_arnold(desk::kA, desk::kOmega);
        CriticalData C = locate_critical_points(L);
        RotationInterval R1 = rotation_interval(L, C, 1e-4);
        RotationInterval R2 = rotation_interval(L, C, 5e-5);
        CHECK(R2.rho_plus_lo <= R1.rho_plus_hi);
        CHECK(R2.rho_plus_hi >= R1.rho_plus_lo);
        CHECK(R2.rho_minus_lo <= R1.rho_minus_hi);
        CHECK(R2.rho_minus_hi >= R1.rho_minus_lo);
    }
}

TEST_CASE("monotone preimages") {
    Lift L = make_arnold(desk::kA, desk::kOmega);
    CriticalData C = locate_critical_points(L);
    MonotoneLift P = build_bound_map(L, C, Side::plus);

    SUBCASE("left inverse of eval") {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> U(-3.0, 3.0);
        for (int i = 0; i < 300; ++i) {
            double v = U(rng);
            double x = monotone_preimage(P, v);
            CHECK(close(P.eval(x), v, 1e-12));
        }
    }
    SUBCASE("plateau collapse and restore") {
        auto I0 = plateau_iterate(P, 0);
        CHECK(I0.first == C.c_plus);
        CHECK(I0.second == C.d_plus);
        auto I1 = plateau_iterate(P, 1);
        CHECK(I1.first == I1.second);
        CHECK(I1.first == P.plateau_value);
        auto Im1 = plateau_iterate(P, -1);
        CHECK(Im1.first < Im1.second);
        CHECK(close(P.eval(Im1.first), C.c_plus, 1e-10));
        CHECK(close(P.eval(Im1.second), C.d_plus, 1e-10));
    }
}

TEST_CASE("rotation ordering witnesses") {
    SUBCASE("trivial triples") {
        Lift L = make_arnold(desk::kA, desk::kOmega);
        MonotoneLift P = build_bound_map(L, locate_critical_points(L),
                                         Side::plus);
        CHECK(order_witness(P, desk::kRhoPlusTarget, 3, 3, 1));
        CHECK(order_witness(P, desk::kRhoPlusTarget, 1, 0, 0));
    }
    SUBCASE("agreement over a triple grid") {
        Lift L = make_arnold(desk::kA, desk::kOmega);
        MonotoneLift P = build_bound_map(L, locate_critical_points(L),
                                         Side::plus);
        int collisions = 0, disagreements = 0;
        for (int i = -12; i <= 12; ++i)
            for (int j = -12; j <= 12; ++j)
                for (int k = -2; k <= 2; ++k) {
                    try {
                        if (!order_witness(P, desk::kRhoPlusTarget, i, j, k))
                            ++disagreements;
                    } catch (const PlateauCollision&) {
                        ++collisions;
                    }
                }
        CHECK(disagreements == 0);
        CHECK(collisions == 0);
    }
    SUBCASE("rational rotation collides") {
        // omega = 0.05 locks the upper number at 0: the plateau maps into
        // itself, so the first iterate overlaps the base interval
        Lift L = make_arnold(0.25, 0.05);
        MonotoneLift P = build_bound_map(L, locate_critical_points(L),
                                         Side::plus);
        CHECK_THROWS_AS(order_witness(P, 0.0, 1, 0, 0), PlateauCollision);
    }
}
