#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bimod/circle.hpp"
#include "bimod/continued_fraction.hpp"
#include "bimod/rotation.hpp"

namespace bimod {

// One monotone branch of a first-return map: f^N carries J onto the target
// interval, intermediate iterates stay out of the target's interior.
struct ReturnBranch {
    CircleInterval J;      // return interval
    CircleInterval J_hat;  // monotone extension (equals J when unavailable)
    std::int64_t N = 0;    // return time
    bool increasing = true;
    CircleInterval target;
};

struct ReturnPartition {
    std::vector<ReturnBranch> branches;  // sorted by J.lo
    CircleInterval target;
    CircleInterval domain;          // swept interval (= target for returns)
    double coverage = 0.0;          // sum |J| / |domain|
    double summability_stat = 0.0;  // sum N(J) |J|
    std::vector<CircleInterval> uncovered;
};

// Anchor intervals around the critical pair, built from periodic points of
// the one-sided return dynamics. All interval fields use lift coordinates
// anchored left of c+ (so I_minus.lo = d- may be negative).
struct DecompositionFrame {
    int M0 = 1;
    double b_plus = 0, a_plus = 0;   // q+_{2M0}-periodic anchor and its image
    // The minus fold sits at the right end of its interval, so the minus
    // anchor takes the odd-index order: b- is q-_{2M0+1}-periodic and
    // a- = f^{q-_{2M0}}(b-).
    double b_minus = 0, a_minus = 0;
    CircleInterval I_full;            // [c+, c-]
    CircleInterval I_plus, I_minus;   // [c+, d+], [d-, c-]
    CircleInterval A_plus, A_L_plus, A_R_plus, A_hat_plus;
    CircleInterval A_minus, A_L_minus, A_R_minus, A_hat_minus;
    CircleInterval A;                 // [a+, a-]
    CircleInterval A_hat;             // A with 10% margins into I-+/I+-
    double residual_plus = 0, residual_minus = 0;  // periodicity defects
};

struct FirstEntry {
    std::int64_t N = 0;
    double image = 0;  // f^N(x), reduced to [0,1)
};

// First n >= 1 with f^n(x) in target (closed, tol-classified); NoEntry
// past n_cap.
FirstEntry first_entry(const Lift& L, const CriticalData& C, double x,
                       const CircleInterval& target,
                       std::int64_t n_cap = 100000, double tol = 1e-12);

// Seed-grid sweep: groups seeds by first-return time, bisects the run
// boundaries, validates each candidate branch (onto target, monotone,
// interior-avoiding) and reports unresolved slivers as uncovered gaps.
ReturnPartition build_return_partition(const Lift& L, const CriticalData& C,
                                       const CircleInterval& target,
                                       int resolution, double tol = 1e-12);

// Same sweep over a domain different from the target (first-entry branches).
ReturnPartition build_entry_partition(const Lift& L, const CriticalData& C,
                                      const CircleInterval& domain,
                                      const CircleInterval& target,
                                      int resolution, double tol = 1e-12);

struct MarkovReport {
    bool pass = false;
    bool coverage_warning = false;  // empty or thin partition
    double worst_endpoint_mismatch = 0.0;
    double worst_monotonicity_defect = 0.0;  // most negative signed step
    std::vector<std::size_t> failed_branches;
};

// Endpoint-image agreement with the target endpoints within tol plus
// monotonicity on 32 interior samples, per branch.
MarkovReport validate_markov(const Lift& L, const ReturnPartition& P,
                             double tol);

struct DistortionReport {
    std::vector<double> per_branch_D;
    double global_D = 0.0;
    double two_step_D = 0.0;  // composed return on nested cylinders
};

// D_J = max over sample pairs of (|Df^N(x)/Df^N(y)| - 1) / d(f^N x, f^N y).
DistortionReport distortion_statistics(const Lift& L,
                                       const ReturnPartition& P,
                                       int samples_per_branch);

// Builds the frame at base level M0: periodic anchors b+- via bisection of
// f^{q_{2M0}} - id on the fold-conjugated pullback of I+-, images a-+, and
// the A/A-hat interval family. FrameInvalid when the required orderings or
// containments fail (raise M0 and retry).
DecompositionFrame build_frame(const Lift& L, const CriticalData& C,
                               const ContinuedFraction& F_plus,
                               const ContinuedFraction& F_minus, int M0,
                               double tol = 1e-12);

struct PrimaryDecomposition {
    struct Piece {
        CircleInterval J;
        int k = 0;             // level
        std::int64_t l = 0;    // index within the level
        std::int64_t order = 0;  // q_{2k} + l q_{2k+1}
    };
    std::vector<Piece> rough;           // sorted left to right
    std::vector<CircleInterval> gaps;   // complementary components in A_L+
    std::vector<double> gap_ratios;     // |T| / |right neighbor J|
    bool orders_monotone = false;
    std::optional<int> exhausted;       // first level cut by precision
};

// Left-neighborhood basis of c+: pullbacks of I+ under the upper map with
// orders from the one-sided return progressions, plus the gap structure.
PrimaryDecomposition primary_decomposition(const Lift& L,
                                           const CriticalData& C,
                                           const ContinuedFraction& F_plus,
                                           const DecompositionFrame& frame,
                                           int k_cap);

struct TailReport {
    std::vector<double> tail;   // tail[n] = empirical fraction {N_A > n}
    double kappa_fit = 0.0;     // exp(-slope) of the log-linear fit
    double r_squared = 0.0;
    std::int64_t cover_n = 0;   // least N with f^N(I) covering the circle
    std::int64_t unresolved = 0;  // samples with no entry within n_cap
};

// Monte Carlo tail of the first-entry time to frame.A plus the exact
// interval-iteration covering time of I.
TailReport tail_and_cover(const Lift& L, const CriticalData& C,
                          const DecompositionFrame& frame,
                          std::int64_t n_cap, const CircleInterval& I,
                          int n_samples = 100000,
                          std::uint64_t seed = 20260819u);

}  // namespace bimod
