#include <algorithm>
#include <cmath>
#include <cstdint>

#include "bimod/continued_fraction.hpp"
#include "bimod/errors.hpp"
#include "bimod/inducing.hpp"
#include "desk_params.hpp"
#include "doctest.h"

using namespace bimod;

namespace {

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

ContinuedFraction desk_cf_plus() {
    return cf_from_quotients({2, 2, 2, 2, 2});
}
ContinuedFraction desk_cf_minus() {
    return cf_from_quotients({2, 1, 2, 1, 2, 1});
}

}  // namespace

TEST_CASE("first entry on the doubling map") {
    Lift L = make_doubling();
    CriticalData C{};
    CircleInterval quarter{0.0, 0.25};

    FirstEntry e = first_entry(L, C, 0.3, quarter);
    CHECK(e.N == 2);
    CHECK(close(e.image, 0.2, 1e-12));

    e = first_entry(L, C, 0.1, quarter);
    CHECK(e.N == 1);
    CHECK(close(e.image, 0.2, 1e-12));

    // 0 is fixed, so it never reaches an interval away from it
    CHECK_THROWS_AS(first_entry(L, C, 0.0, CircleInterval{0.25, 0.5}, 2000),
                    NoEntry);
    CHECK_THROWS_AS(first_entry(L, C, 0.3, quarter, 0), ConfigError);
}

TEST_CASE("doubling return partition is the dyadic cascade") {
    Lift L = make_doubling();
    CriticalData C{};
    CircleInterval half{0.0, 0.5};

    CHECK_THROWS_AS(build_return_partition(L, C, half, 8), ResolutionTooCoarse);

    ReturnPartition P = build_return_partition(L, C, half, 4096);
    REQUIRE(P.branches.size() >= 8);
    CHECK(P.coverage >= 0.999);
    CHECK(close(P.summability_stat, 1.0, 0.01));

    // J_k = [1/2 - 2^-k, 1/2 - 2^-(k+1)] returns after exactly k steps
    for (int k = 1; k <= 8; ++k) {
        const ReturnBranch& b = P.branches[k - 1];
        CHECK(b.N == k);
        CHECK(close(b.J.lo, 0.5 - std::ldexp(1.0, -k), 1e-9));
        CHECK(close(b.J.hi, 0.5 - std::ldexp(1.0, -k - 1), 1e-9));
        CHECK(b.increasing);
    }

    // sorted with disjoint interiors, and the reported time is the true
    // first-entry time of the midpoint
    for (std::size_t i = 0; i < P.branches.size(); ++i) {
        if (i + 1 < P.branches.size())
            CHECK(P.branches[i + 1].J.lo >= P.branches[i].J.hi - 1e-10);
        double mid = 0.5 * (P.branches[i].J.lo + P.branches[i].J.hi);
        CHECK(first_entry(L, C, mid, half).N == P.branches[i].N);
    }

    MarkovReport M = validate_markov(L, P, 1e-9);
    CHECK(M.pass);
    CHECK(!M.coverage_warning);
    CHECK(M.failed_branches.empty());

    // piecewise-linear map: zero distortion on every branch
    DistortionReport D = distortion_statistics(L, P, 8);
    CHECK(D.global_D < 1e-8);
    CHECK(D.two_step_D < 1e-8);
    for (double d : D.per_branch_D) CHECK(d < 1e-8);

    // refinement keeps every branch it already certified
    ReturnPartition P2 = build_return_partition(L, C, half, 8192);
    CHECK(P2.coverage >= P.coverage - 1e-6);
    for (const ReturnBranch& b : P.branches) {
        bool found = false;
        for (const ReturnBranch& b2 : P2.branches)
            if (b2.N == b.N && close(b2.J.lo, b.J.lo, 1e-9) &&
                close(b2.J.hi, b.J.hi, 1e-9))
                found = true;
        CHECK(found);
    }
}

TEST_CASE("doubling entry partition from the complementary half") {
    Lift L = make_doubling();
    CriticalData C{};
    CircleInterval half{0.0, 0.5};
    ReturnPartition P =
        build_entry_partition(L, C, CircleInterval{0.5, 1.0}, half, 4096);
    REQUIRE(P.branches.size() >= 6);
    CHECK(P.coverage >= 0.999);
    for (int k = 1; k <= 6; ++k) {
        const ReturnBranch& b = P.branches[k - 1];
        CHECK(b.N == k);
        CHECK(close(b.J.lo, 1.0 - std::ldexp(1.0, -k), 1e-9));
        CHECK(close(b.J.hi, 1.0 - std::ldexp(1.0, -k - 1), 1e-9));
    }
    CHECK(validate_markov(L, P, 1e-9).pass);
}

TEST_CASE("synthetic tail: doubling entry times are geometric") {
    Lift L = make_doubling();
    CriticalData C{};
    DecompositionFrame fr;
    fr.A = {0.0, 0.5};

    TailReport T = tail_and_cover(L, C, fr, 1000, CircleInterval{0.2, 0.3});
    CHECK(T.unresolved == 0);
    REQUIRE(T.tail.size() >= 5);
    CHECK(close(T.tail[0], 1.0, 1e-12));
    CHECK(close(T.tail[1], 0.5, 0.01));
    CHECK(close(T.kappa_fit, 2.0, 0.1));
    CHECK(T.r_squared >= 0.99);
    // [0.2,0.3] doubles to length >= 1 after 4 steps
    CHECK(T.cover_n == 4);

    TailReport T2 = tail_and_cover(L, C, fr, 1000, CircleInterval{0.0, 0.5});
    CHECK(T2.cover_n == 1);

    CHECK_THROWS_AS(tail_and_cover(L, C, fr, 0, CircleInterval{0.2, 0.3}),
                    ConfigError);
}

TEST_CASE("desk map: decomposition frame matches the periodic anchors") {
    Lift L = make_arnold(desk::kA, desk::kOmega);
    CriticalData C = locate_critical_points(L);
    ContinuedFraction Fp = desk_cf_plus();
    ContinuedFraction Fm = desk_cf_minus();

    DecompositionFrame fr = build_frame(L, C, Fp, Fm, 1);
    CHECK(fr.M0 == 1);
    // frozen reference values from an independent pullback implementation
    CHECK(close(fr.b_plus, 0.75470028324082583, 1e-10));
    CHECK(close(fr.a_plus, 0.26288182490231482, 1e-9));
    CHECK(close(fr.b_minus, 0.2454768636758865, 1e-10));
    CHECK(close(fr.a_minus, 0.69051254665163164, 1e-9));
    CHECK(fr.residual_plus <= 1e-9);
    CHECK(fr.residual_minus <= 1e-9);

    // orderings: d- < a+ < c+ < b+ < d+ and d- < b- < c- < a- < d+
    CHECK(C.d_minus < fr.a_plus);
    CHECK(fr.a_plus < C.c_plus);
    CHECK(C.c_plus < fr.b_plus);
    CHECK(fr.b_plus < C.d_plus);
    CHECK(C.d_minus < fr.b_minus);
    CHECK(fr.b_minus < C.c_minus);
    CHECK(C.c_minus < fr.a_minus);
    CHECK(fr.a_minus < C.d_plus);

    // interval family assembly
    CHECK(fr.I_full.lo == C.c_plus);
    CHECK(fr.I_full.hi == C.c_minus);
    CHECK(fr.A_plus.lo == C.c_plus);
    CHECK(fr.A_plus.hi == fr.b_plus);
    CHECK(fr.A_L_plus.lo == fr.a_plus);
    CHECK(fr.A_L_plus.hi == C.c_plus);
    CHECK(fr.A_R_minus.lo == C.c_minus);
    CHECK(fr.A_R_minus.hi == fr.a_minus);
    CHECK(fr.A.lo == fr.a_plus);
    CHECK(fr.A.hi == fr.a_minus);
    CHECK(close(fr.A_hat.lo, fr.a_plus - 0.1 * (fr.a_plus - C.d_minus),
                1e-15));
    CHECK(close(fr.A_hat.hi, fr.a_minus + 0.1 * (C.d_plus - fr.a_minus),
                1e-15));

    // deeper frame: anchors creep toward the flat ends
    DecompositionFrame fr2 = build_frame(L, C, Fp, Fm, 2);
    CHECK(close(fr2.b_plus, 0.75539128599121064, 1e-9));
    CHECK(close(fr2.a_plus, 0.3721319298424044, 1e-8));
    CHECK(close(fr2.b_minus, 0.24460899504233724, 1e-9));
    CHECK(close(fr2.a_minus, 0.63020949540540505, 1e-8));
    CHECK(fr2.b_plus > fr.b_plus);
    CHECK(fr2.a_plus > fr.a_plus);

    // swapping the two rotation numbers sends the pullback outside the
    // fold window
    CHECK_THROWS_AS(build_frame(L, C, Fm, Fp, 1), FrameInvalid);
    CHECK_THROWS_AS(build_frame(L, C, Fp, Fm, 0), ConfigError);
    CHECK_THROWS_AS(build_frame(L, C, Fp, Fm, 3), ConfigError);
}

TEST_CASE("desk map: primary decomposition follows the return ladder") {
    Lift L = make_arnold(desk::kA, desk::kOmega);
    CriticalData C = locate_critical_points(L);
    ContinuedFraction Fp = desk_cf_plus();
    DecompositionFrame fr = build_frame(L, C, Fp, desk_cf_minus(), 1);

    CHECK_THROWS_AS(primary_decomposition(L, C, Fp, fr, 0), ConfigError);

    PrimaryDecomposition D = primary_decomposition(L, C, Fp, fr, 10);
    REQUIRE(D.rough.size() >= 3);
    CHECK(D.rough.size() <= 4);

    // frozen piece table (independent pullback implementation)
    const double lo[] = {0.27649185578294322, 0.36251946851880668,
                         0.37214102408772831};
    const double hi[] = {0.36247977022706879, 0.37213192988025057,
                         0.37655850524157586};
    const std::int64_t ord[] = {5, 17, 29};
    const int kk[] = {1, 1, 2};
    const std::int64_t ll[] = {0, 1, 0};
    for (int i = 0; i < 3; ++i) {
        CHECK(D.rough[i].order == ord[i]);
        CHECK(D.rough[i].k == kk[i]);
        CHECK(D.rough[i].l == ll[i]);
        CHECK(close(D.rough[i].J.lo, lo[i], 1e-8));
        CHECK(close(D.rough[i].J.hi, hi[i], 1e-8));
    }
    if (D.rough.size() == 4) {
        CHECK(D.rough[3].order == 99);
        CHECK(close(D.rough[3].J.length(), 5.94452e-06, 2e-7));
    }

    // pieces stay inside A_L+ in increasing depth order
    CHECK(D.orders_monotone);
    double prev = fr.A_L_plus.lo - 1e-12;
    for (const auto& piece : D.rough) {
        CHECK(piece.J.lo >= prev);
        CHECK(piece.J.hi <= C.c_plus);
        prev = piece.J.hi;
    }

    REQUIRE(D.gap_ratios.size() >= 3);
    CHECK(close(D.gap_ratios[0], 0.158278, 2e-4));
    CHECK(close(D.gap_ratios[1], 0.00412988, 1e-5));
    CHECK(close(D.gap_ratios[2], 0.00205869, 1e-5));
    for (double r : D.gap_ratios) CHECK(r < 0.2);

    // binary64 cannot separate the level-2 continuation from its neighbor
    REQUIRE(D.exhausted.has_value());
    CHECK(*D.exhausted == 2);
}

TEST_CASE("desk map: return partition to the central interval is Markov") {
    Lift L = make_arnold(desk::kA, desk::kOmega);
    CriticalData C = locate_critical_points(L);
    CircleInterval I{C.c_plus, C.c_minus};

    ReturnPartition P = build_return_partition(L, C, I, 20000);
    REQUIRE(!P.branches.empty());
    CHECK(P.coverage >= 0.995);
    CHECK(P.summability_stat > 0.2);
    CHECK(P.summability_stat < 100.0);

    double uncov = 0;
    for (const auto& g : P.uncovered) uncov += g.length();
    CHECK(uncov <= 0.005 * I.length());

    MarkovReport M = validate_markov(L, P, 1e-8);
    CHECK(M.pass);
    CHECK(M.failed_branches.empty());

    for (std::size_t i = 0; i < P.branches.size(); ++i) {
        const ReturnBranch& b = P.branches[i];
        CHECK(b.N >= 1);
        if (i + 1 < P.branches.size())
            CHECK(P.branches[i + 1].J.lo >= b.J.hi - 1e-10);
        double mid = 0.5 * (b.J.lo + b.J.hi);
        CHECK(first_entry(L, C, mid, I).N == b.N);
    }
}

TEST_CASE("desk map: entry-time tail and covering diagnostics") {
    Lift L = make_arnold(desk::kA, desk::kOmega);
    CriticalData C = locate_critical_points(L);
    DecompositionFrame fr =
        build_frame(L, C, desk_cf_plus(), desk_cf_minus(), 1);

    TailReport T = tail_and_cover(L, C, fr, 100000, fr.I_full);
    CHECK(T.unresolved == 0);
    REQUIRE(T.tail.size() >= 3);
    CHECK(close(T.tail[0], 1.0, 1e-12));
    for (std::size_t n = 1; n < T.tail.size(); ++n)
        CHECK(T.tail[n] <= T.tail[n - 1] + 1e-12);
    CHECK(T.kappa_fit > 1.05);
    CHECK(T.r_squared >= 0.95);
    CHECK(T.cover_n >= 1);
    CHECK(T.cover_n <= 60);
}
