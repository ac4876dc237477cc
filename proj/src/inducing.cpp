#include "bimod/inducing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <utility>
#include <vector>

namespace bimod {

namespace {

constexpr std::int64_t kTimeCap = 100'000'000;
// Branch boundaries are bisected to this width; slivers below a few widths
// are dropped rather than reported.
constexpr double kBoundaryWidth = 1e-15;
// A branch whose endpoint images miss the target by more than this ceiling
// cannot be pinned down in binary64 (roundoff times the orbit's worst
// partial derivative product) and is left uncovered.
constexpr double kOntoCeiling = 9e-9;

std::int64_t to_time(const big_int& q) {
    if (q < 0 || q > kTimeCap)
        throw OutOfRange("return time exceeds the iteration cap");
    return q.convert_to<std::int64_t>();
}

// f~^n(x) on the lift, windings kept.
double lift_iter(const Lift& L, double x, std::int64_t n) {
    for (std::int64_t t = 0; t < n; ++t) x = L.eval(x);
    return x;
}

inline double cstep(const Lift& L, double x) { return frac(L.eval(x)); }

inline long double frac_l(long double x) {
    long double f = x - floorl(x);
    return f < 1.0L ? f : 0.0L;
}

// Wrapped orbit in the widest precision the family provides. Cuts get
// classified by probing through this chain, so every later re-measurement
// of a branch must step through the identical chain; mixing the double and
// extended chains on the same point disagrees by more than the acceptance
// window once the derivative product along the orbit is large.
struct Walker {
    const Lift& L;
    bool wide;
    long double yl = 0;
    double yd = 0;
    Walker(const Lift& lift, double x)
        : L(lift), wide(static_cast<bool>(lift.eval_ld)) {
        if (wide)
            yl = frac_l(static_cast<long double>(x));
        else
            yd = frac(x);
    }
    void step() {
        if (wide)
            yl = frac_l(L.eval_ld(yl));
        else
            yd = cstep(L, yd);
    }
    double pos() const { return wide ? static_cast<double>(yl) : yd; }
};

inline double step_eps(const Lift& L) {
    return L.eval_ld ? static_cast<double>(
                           std::numeric_limits<long double>::epsilon())
                     : std::numeric_limits<double>::epsilon();
}

struct Probe {
    std::int64_t N = -1;  // -1: no entry within the cap
    double image = 0;
};

Probe probe_entry(const Lift& L, const CircleInterval& target, double x,
                  std::int64_t n_cap, double tol) {
    Walker w(L, x);
    for (std::int64_t n = 1; n <= n_cap; ++n) {
        w.step();
        if (target.contains(w.pos(), tol)) return {n, w.pos()};
    }
    return {};
}

// Representative of x in (anchor - 1, anchor].
double reduce_up_to(double x, double anchor) {
    return anchor - frac(anchor - x);
}

// Sign of Df^N along the orbit; 0 when a derivative vanishes on it.
int sign_dfn(const Lift& L, double x, std::int64_t N) {
    double y = frac(x);
    int s = 1;
    for (std::int64_t n = 0; n < N; ++n) {
        double d = L.deriv(y);
        if (d == 0.0) return 0;
        if (d < 0.0) s = -s;
        y = cstep(L, y);
    }
    return s;
}

struct BranchCheck {
    bool ok = false;
    bool increasing = true;
    double onto_err = 0;
};

// Candidate branch [lo, hi] with time N: intermediates off the open target,
// endpoint images onto the target endpoints, strictly monotone samples.
BranchCheck check_branch(const Lift& L, const CircleInterval& target,
                         double lo, double hi, std::int64_t N, double tol) {
    BranchCheck r;
    if (!(hi > lo) || N < 1) return r;

    // Branch endpoints sit on cuts classified with the probe's inflated
    // target, so their orbits may graze up to ~tol inside; only deeper
    // penetrations mean a genuinely earlier entry. The midpoint pass also
    // accumulates the worst partial derivative product along the orbit,
    // which bounds how well binary64 can resolve this branch at all.
    double margin = std::max(64.0 * tol, 1e-10);
    double logS = 0, logS_min = 0;
    for (double s : {lo, 0.5 * (lo + hi), hi}) {
        bool is_mid = s != lo && s != hi;
        Walker w(L, s);
        for (std::int64_t n = 1; n <= N; ++n) {
            if (is_mid) {
                double d = std::abs(L.deriv(w.pos()));
                logS += std::log(std::max(d, 1e-300));
                logS_min = std::min(logS_min, logS);
            }
            if (n == N) break;
            w.step();
            double t = target.lift_rep(w.pos());
            if (t > target.lo + margin && t < target.hi - margin) return r;
        }
    }
    double amp = std::exp(std::min(logS - logS_min, 700.0));
    double dfn = std::exp(std::min(logS, 700.0));

    double ylo = lift_iter(L, lo, N), yhi = lift_iter(L, hi, N);
    r.increasing = yhi > ylo;
    // Endpoint images must be measured with the same wrapped stepping the
    // probe used to place the cuts; the unwrapped lift accumulates rounding
    // at a coarser ulp and disagrees by more than the acceptance window.
    Walker wl(L, lo), wh(L, hi);
    for (std::int64_t n = 0; n < N; ++n) {
        wl.step();
        wh.step();
    }
    double e_lo = circle_dist(wl.pos(), r.increasing ? target.lo : target.hi);
    double e_hi = circle_dist(wh.pos(), r.increasing ? target.hi : target.lo);
    r.onto_err = std::max(e_lo, e_hi);
    // Expected endpoint error has two parts. The cut itself sits up to a
    // bisection width away from the true boundary, and that offset is
    // stretched by the full derivative product of the branch. On top of
    // that, orbit roundoff is amplified by the worst tail of the product
    // (a cut next to a critical point is conditioned far worse than the
    // mean slope suggests). Beyond the ceiling the branch is uncertifiable.
    double noise = 8.0 * kBoundaryWidth * dfn + 8.0 * step_eps(L) * amp;
    double tol_onto = std::max(
        std::min(std::max(4.0 * std::max(tol, 1e-12), noise), kOntoCeiling),
        tol);
    if (r.onto_err > tol_onto) return r;

    double prev = ylo;
    for (int i = 1; i <= 9; ++i) {
        double y = lift_iter(L, lo + (hi - lo) * i / 10.0, N);
        if (r.increasing ? (y <= prev) : (y >= prev)) return r;
        prev = y;
    }
    if (r.increasing ? (yhi <= prev) : (yhi >= prev)) return r;

    r.ok = true;
    return r;
}

// Extension of J mapping over the target inflated by 10% per side, when the
// monotone continuation reaches that far; J itself otherwise.
CircleInterval extend_branch(const Lift& L, const CircleInterval& J,
                             std::int64_t N, bool increasing,
                             const CircleInterval& target) {
    double infl = 0.1 * target.length();
    double w = std::max(J.length(), 1e-300);
    CircleInterval H = J;
    double ylo = lift_iter(L, J.lo, N), yhi = lift_iter(L, J.hi, N);

    auto pull = [&](double from, double out, double want) -> double {
        // bisect f~^N = want on [from, from + out], monotone side assumed
        double a = from, b = from + out;
        double va = lift_iter(L, a, N), vb = lift_iter(L, b, N);
        if ((va < want) == (vb < want)) return from;  // not reached: keep J
        for (int t = 0; t < 80 && std::abs(b - a) > 1e-15; ++t) {
            double m = 0.5 * (a + b);
            if ((lift_iter(L, m, N) < want) == (va < want))
                a = m;
            else
                b = m;
        }
        return 0.5 * (a + b);
    };

    double want_lo = ylo + (increasing ? -infl : infl);
    double cand = pull(J.lo, -4.0 * w, want_lo);
    if (cand < J.lo) H.lo = cand;
    double want_hi = yhi + (increasing ? infl : -infl);
    cand = pull(J.hi, 4.0 * w, want_hi);
    if (cand > J.hi) H.hi = cand;

    // require monotone continuation over the extension
    for (double s : {H.lo + 0.25 * (J.lo - H.lo), H.hi - 0.25 * (H.hi - J.hi)}) {
        if (s == J.lo || s == J.hi) continue;
        if (sign_dfn(L, s, N) != sign_dfn(L, 0.5 * (J.lo + J.hi), N))
            return J;
    }
    return H;
}

// Validate [lo, hi] as a time-N branch; on a monotonicity fold, split at
// the derivative sign change and recurse. Accepted branches appended in
// position order.
void try_branch(const Lift& L, const CircleInterval& target, double lo,
                double hi, std::int64_t N, std::int64_t n_cap, double tol,
                int depth, std::vector<ReturnBranch>& out) {
    if (hi - lo < 4 * kBoundaryWidth || N < 1) return;
    Probe pm = probe_entry(L, target, 0.5 * (lo + hi), n_cap, tol);
    if (pm.N < 1) return;
    if (pm.N == N) {
        BranchCheck bc = check_branch(L, target, lo, hi, N, tol);
        if (bc.ok) {
            ReturnBranch b;
            b.J = {lo, hi};
            b.N = N;
            b.increasing = bc.increasing;
            b.target = target;
            b.J_hat = extend_branch(L, b.J, b.N, b.increasing, target);
            out.push_back(b);
            return;
        }
    }
    if (depth >= 3) return;
    double u = lo + (hi - lo) * 1e-3;
    int s0 = sign_dfn(L, u, pm.N);
    for (int i = 1; i <= 32; ++i) {
        double v = lo + (hi - lo) * (i == 32 ? 1.0 - 1e-3 : i / 32.0);
        int s1 = sign_dfn(L, v, pm.N);
        if (s1 != 0 && s0 != 0 && s1 != s0) {
            double a = u, b = v;
            while (b - a > kBoundaryWidth) {
                double m = 0.5 * (a + b);
                if (m <= a || m >= b) break;
                int sm = sign_dfn(L, m, pm.N);
                if (sm == s0)
                    a = m;
                else
                    b = m;
            }
            double z = 0.5 * (a + b);
            try_branch(L, target, lo, z, N, n_cap, tol, depth + 1, out);
            try_branch(L, target, z, hi, N, n_cap, tol, depth + 1, out);
            return;
        }
        if (s1 != 0) {
            s0 = s1;
            u = v;
        }
    }
}

ReturnPartition build_partition_impl(const Lift& L,
                                     const CircleInterval& domain,
                                     const CircleInterval& target,
                                     int resolution, double tol) {
    if (resolution < 16)
        throw ResolutionTooCoarse("fewer than 16 sweep seeds");
    double len = domain.length();
    if (!(len > 0)) throw ConfigError("empty sweep domain");
    const std::int64_t n_cap = 100000;

    std::int64_t used = 0;  // probe budget spent on seeds and edge bisection
    auto et = [&](double x) {
        ++used;
        return probe_entry(L, target, x, n_cap, tol).N;
    };
    // Entry time equal to N exactly; the probe never needs to run past N
    // steps to answer this, which matters next to the towers where entry
    // times run orders beyond any branch under consideration.
    auto et_is = [&](double x, std::int64_t N) {
        ++used;
        return probe_entry(L, target, x, N, tol).N == N;
    };
    // Shift the equals-N boundary from `outside` toward `anchor`.
    auto edge = [&](double anchor, double outside, std::int64_t N) {
        double a = anchor, b = outside;
        while (std::abs(b - a) > kBoundaryWidth) {
            double m = 0.5 * (a + b);
            if (m == a || m == b) break;
            (et_is(m, N) ? a : b) = m;
        }
        return a;
    };
    // Extend the run through `anchor` toward `bound`. Bare bisection can
    // land on a same-time island across intervening dust, welding two
    // branches plus the dust into one doomed candidate; sample the carved
    // span and pull the cut back to the first contradiction.
    auto carve_edge = [&](double anchor, double bound, std::int64_t N) {
        double s = et_is(bound, N) ? bound : edge(anchor, bound, N);
        for (int round = 0; round < 4; ++round) {
            double bad = 0;
            bool clean = true;
            for (int i = 1; i <= 7 && clean; ++i) {
                double x = anchor + (s - anchor) * i / 8.0;
                if (x != anchor && x != s && !et_is(x, N)) {
                    bad = x;
                    clean = false;
                }
            }
            if (clean) return s;
            s = edge(anchor, bad, N);
        }
        return anchor;
    };

    ReturnPartition P;
    P.target = target;
    P.domain = domain;
    auto by_lo = [](const ReturnBranch& a, const ReturnBranch& b) {
        return a.J.lo < b.J.lo;
    };

    // Each maximal constant-N seed run is one branch candidate; its exact
    // ends come from bisecting the run's own entry time against the
    // neighboring seeds (the landscape between fat branches is a dust of
    // deeper branches, so there is no budget that resolves a whole gap).
    auto sweep_segment = [&](double glo, double ghi, int m) -> std::size_t {
        std::size_t before = P.branches.size();
        double gw = ghi - glo;
        used += m;
        std::vector<double> xs(m);
        std::vector<std::int64_t> Ns(m);
        for (int i = 0; i < m; ++i) {
            xs[i] = glo + gw * (i + 0.5) / m;
            Ns[i] = probe_entry(L, target, xs[i], n_cap, tol).N;
        }
        for (int i0 = 0; i0 < m;) {
            int i1 = i0;
            while (i1 + 1 < m && Ns[i1 + 1] == Ns[i0]) ++i1;
            std::int64_t N = Ns[i0];
            if (N >= 1) {
                double lo = carve_edge(xs[i0], i0 == 0 ? glo : xs[i0 - 1], N);
                double hi =
                    carve_edge(xs[i1], i1 == m - 1 ? ghi : xs[i1 + 1], N);
                try_branch(L, target, lo, hi, N, n_cap, tol, 0, P.branches);
            }
            i0 = i1 + 1;
        }
        return P.branches.size() - before;
    };

    sweep_segment(domain.lo, domain.hi, resolution);

    // The dust between fat branches carries real measure and is drained by
    // recursive carving: probe the midpoint of the widest remaining gap,
    // bisect out the maximal equal-time span around it, certify that span
    // once, and return the two flanks to the queue. A span that fails
    // certification stays dead and is never re-entered, so every probe
    // lands on unexplored ground. The drain stops once the covered mass
    // clears the target with margin; the myriad ever-thinner branches
    // accumulating on critical preimages carry no further material mass.
    const double kGapFloor = std::max(64 * kBoundaryWidth, 1e-10);
    const double kCoverageStop = 0.99975;
    const std::int64_t budget = 1000ll * resolution;
    struct Gap {
        double w, lo, hi;
        bool operator<(const Gap& o) const { return w < o.w; }
    };
    std::priority_queue<Gap> q;
    double covered_live = 0;
    {
        std::sort(P.branches.begin(), P.branches.end(), by_lo);
        double p = domain.lo;
        for (const ReturnBranch& b : P.branches) {
            covered_live += b.J.length();
            if (b.J.lo - p > kGapFloor) q.push({b.J.lo - p, p, b.J.lo});
            p = std::max(p, b.J.hi);
        }
        if (domain.hi - p > kGapFloor) q.push({domain.hi - p, p, domain.hi});
    }
    while (!q.empty() && used < budget &&
           covered_live < kCoverageStop * len) {
        Gap g = q.top();
        q.pop();
        double mid = 0.5 * (g.lo + g.hi);
        std::int64_t N = et(mid);
        // A midpoint that never enters sits in a pocket of the
        // non-entering set; the pocket cannot be carved, so the whole
        // span is left unresolved rather than probed to death.
        if (N < 1) continue;
        double slo = carve_edge(mid, g.lo, N);
        double shi = carve_edge(mid, g.hi, N);
        std::size_t before = P.branches.size();
        try_branch(L, target, slo, shi, N, n_cap, tol, 0, P.branches);
        for (std::size_t j = before; j < P.branches.size(); ++j)
            covered_live += P.branches[j].J.length();
        if (slo - g.lo > kGapFloor) q.push({slo - g.lo, g.lo, slo});
        if (g.hi - shi > kGapFloor) q.push({g.hi - shi, shi, g.hi});
    }

    std::sort(P.branches.begin(), P.branches.end(), by_lo);
    double covered = 0, summ = 0, pend = domain.lo;
    for (const ReturnBranch& b : P.branches) {
        covered += b.J.length();
        summ += double(b.N) * b.J.length();
        if (b.J.lo - pend > 4 * kBoundaryWidth)
            P.uncovered.push_back({pend, b.J.lo});
        pend = b.J.hi;
    }
    if (domain.hi - pend > 4 * kBoundaryWidth)
        P.uncovered.push_back({pend, domain.hi});
    P.coverage = covered / len;
    P.summability_stat = summ;
    return P;
}

}  // namespace

FirstEntry first_entry(const Lift& L, const CriticalData& C, double x,
                       const CircleInterval& target, std::int64_t n_cap,
                       double tol) {
    (void)C;
    if (n_cap < 1) throw ConfigError("n_cap must be positive");
    Probe p = probe_entry(L, target, x, n_cap, tol);
    if (p.N < 0) throw NoEntry("no entry into the target within the cap");
    return {p.N, p.image};
}

ReturnPartition build_return_partition(const Lift& L, const CriticalData& C,
                                       const CircleInterval& target,
                                       int resolution, double tol) {
    (void)C;
    return build_partition_impl(L, target, target, resolution, tol);
}

ReturnPartition build_entry_partition(const Lift& L, const CriticalData& C,
                                      const CircleInterval& domain,
                                      const CircleInterval& target,
                                      int resolution, double tol) {
    (void)C;
    return build_partition_impl(L, domain, target, resolution, tol);
}

MarkovReport validate_markov(const Lift& L, const ReturnPartition& P,
                             double tol) {
    MarkovReport r;
    r.pass = true;
    r.coverage_warning = P.branches.empty() || P.coverage < 0.9;
    for (std::size_t i = 0; i < P.branches.size(); ++i) {
        const ReturnBranch& b = P.branches[i];
        double ylo = lift_iter(L, b.J.lo, b.N);
        double yhi = lift_iter(L, b.J.hi, b.N);
        bool inc = yhi > ylo;
        // endpoint images through wrapped steps, matching the sweep's probe
        Walker wl(L, b.J.lo), wh(L, b.J.hi);
        for (std::int64_t n = 0; n < b.N; ++n) {
            wl.step();
            wh.step();
        }
        double e1 = circle_dist(wl.pos(), inc ? P.target.lo : P.target.hi);
        double e2 = circle_dist(wh.pos(), inc ? P.target.hi : P.target.lo);
        double mismatch = std::max(e1, e2);
        double defect = 0;
        double prev = ylo;
        for (int k = 1; k <= 32; ++k) {
            double y = lift_iter(L, b.J.lo + b.J.length() * k / 33.0, b.N);
            double step = inc ? y - prev : prev - y;
            if (step <= 0) defect = std::max(defect, -step);
            prev = y;
        }
        double last = inc ? yhi - prev : prev - yhi;
        if (last <= 0) defect = std::max(defect, -last);
        r.worst_endpoint_mismatch = std::max(r.worst_endpoint_mismatch, mismatch);
        r.worst_monotonicity_defect = std::max(r.worst_monotonicity_defect, defect);
        if (mismatch > tol || defect > 0) {
            r.failed_branches.push_back(i);
            r.pass = false;
        }
    }
    return r;
}

DistortionReport distortion_statistics(const Lift& L,
                                       const ReturnPartition& P,
                                       int samples_per_branch) {
    if (samples_per_branch < 2)
        throw ConfigError("need at least two samples per branch");
    int s = std::min(samples_per_branch, 64);
    DistortionReport r;

    // log|Df^N| and the image at interior points of [lo, hi]
    auto scan = [&](double lo, double hi, std::int64_t N,
                    std::vector<double>& lg, std::vector<double>& im) {
        for (int i = 0; i < s; ++i) {
            double x = lo + (hi - lo) * (i + 1.0) / (s + 1.0);
            double y = frac(x), acc = 0;
            bool bad = false;
            for (std::int64_t n = 0; n < N && !bad; ++n) {
                double d = std::abs(L.deriv(y));
                if (d < 1e-300)
                    bad = true;
                else
                    acc += std::log(d);
                y = cstep(L, y);
            }
            if (!bad) {
                lg.push_back(acc);
                im.push_back(y);
            }
        }
    };
    auto pair_max = [](const std::vector<double>& lg,
                       const std::vector<double>& im) {
        double D = 0;
        for (std::size_t i = 0; i < lg.size(); ++i)
            for (std::size_t j = i + 1; j < lg.size(); ++j) {
                double dd = circle_dist(im[i], im[j]);
                if (dd < 1e-12) continue;
                D = std::max(D, (std::exp(std::abs(lg[i] - lg[j])) - 1.0) / dd);
            }
        return D;
    };

    for (const ReturnBranch& b : P.branches) {
        std::vector<double> lg, im;
        scan(b.J.lo, b.J.hi, b.N, lg, im);
        double D = pair_max(lg, im);
        r.per_branch_D.push_back(D);
        r.global_D = std::max(r.global_D, D);
    }

    // two-step constant: compose through the widest branches
    std::vector<std::size_t> order(P.branches.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return P.branches[a].J.length() > P.branches[b].J.length();
    });
    for (std::size_t t = 0; t < order.size() && t < 3; ++t) {
        const ReturnBranch& b1 = P.branches[order[t]];
        // group sample points by the branch their image lands in
        std::vector<std::vector<double>> lg2(P.branches.size()),
            im2(P.branches.size());
        for (int i = 0; i < 4 * s; ++i) {
            double x = b1.J.lo + b1.J.length() * (i + 1.0) / (4.0 * s + 1.0);
            double y = frac(x), acc = 0;
            bool bad = false;
            for (std::int64_t n = 0; n < b1.N && !bad; ++n) {
                double d = std::abs(L.deriv(y));
                if (d < 1e-300)
                    bad = true;
                else
                    acc += std::log(d);
                y = cstep(L, y);
            }
            if (bad) continue;
            for (std::size_t j = 0; j < P.branches.size(); ++j) {
                const ReturnBranch& b2 = P.branches[j];
                double rep = b2.J.lift_rep(y);
                if (rep < b2.J.lo || rep > b2.J.hi) continue;
                double z = rep, acc2 = acc;
                for (std::int64_t n = 0; n < b2.N && !bad; ++n) {
                    double d = std::abs(L.deriv(frac(z)));
                    if (d < 1e-300)
                        bad = true;
                    else
                        acc2 += std::log(d);
                    z = cstep(L, z);
                }
                if (!bad) {
                    lg2[j].push_back(acc2);
                    im2[j].push_back(frac(z));
                }
                break;
            }
        }
        for (std::size_t j = 0; j < P.branches.size(); ++j)
            if (lg2[j].size() >= 2)
                r.two_step_D = std::max(r.two_step_D, pair_max(lg2[j], im2[j]));
    }
    return r;
}

DecompositionFrame build_frame(const Lift& L, const CriticalData& C,
                               const ContinuedFraction& F_plus,
                               const ContinuedFraction& F_minus, int M0,
                               double tol) {
    if (M0 < 1) throw ConfigError("frame level must be at least 1");
    if (2 * M0 > F_plus.k_max || 2 * M0 + 1 > F_minus.k_max)
        throw ConfigError("frame level beyond certified quotients");
    std::int64_t qp = to_time(F_plus.q[2 * M0]);
    std::int64_t qp1 = to_time(F_plus.q[2 * M0 - 1]);
    // The minus critical interval has its fold at the right end, so the
    // adjacent pullback needs the convergent whose return lands on that
    // side: the odd-index one.  Anchor order q_{2M0+1}, image step q_{2M0}.
    std::int64_t qm = to_time(F_minus.q[2 * M0 + 1]);
    std::int64_t qm1 = to_time(F_minus.q[2 * M0]);

    MonotoneLift MP = build_bound_map(L, C, Side::plus);
    MonotoneLift MM = build_bound_map(L, C, Side::minus);

    DecompositionFrame fr;
    fr.M0 = M0;
    fr.I_plus = {C.c_plus, C.d_plus};
    fr.I_minus = {C.d_minus, C.c_minus};
    fr.I_full = {C.c_plus, C.c_minus};

    // Fold conjugacy: the increasing match of [d-, c+] onto [c-, d+] along
    // equal lift values, and its inverse.
    auto psi_right = [&](double x) {
        return monotone_solve(L, L.eval(x), C.c_minus, C.d_plus, 1e-15);
    };
    auto psi_left = [&](double y) {
        return monotone_solve(L, L.eval(y), C.d_minus, C.c_plus, 1e-15);
    };
    // Bisect f~^q - id - W between ordered endpoints with a sign change.
    auto anchor = [&](double lo, double hi, std::int64_t q,
                      const char* side) -> double {
        double W = std::ceil(lift_iter(L, lo, q) - lo - 0.5);
        auto h = [&](double x) { return lift_iter(L, x, q) - x - W; };
        if (!(h(lo) < 0 && h(hi) > 0))
            throw FrameInvalid(std::string("no periodic anchor bracket on ") +
                               side);
        double a = lo, b = hi;
        while (b - a > 1e-14) {
            double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            if (h(m) < 0)
                a = m;
            else
                b = m;
        }
        return 0.5 * (a + b);
    };

    // plus side: pull I+ back q_{2M0} steps under the upper map
    {
        auto [klo, khi] = plateau_iterate(MP, -static_cast<int>(qp), 1e-15);
        double shift = std::ceil(khi - C.c_plus);
        klo -= shift;
        khi -= shift;
        if (!(klo > C.d_minus && khi < C.c_plus - 1e-13))
            throw FrameInvalid("plus pullback leaves the fold window");
        double plo = psi_right(klo), phi = psi_right(khi);
        if (!(plo < phi))
            throw FrameInvalid("plus fold conjugacy not increasing");
        fr.b_plus = anchor(plo, phi, qp, "plus");
        fr.residual_plus =
            circle_dist(frac(lift_iter(L, fr.b_plus, qp)), frac(fr.b_plus));
        if (fr.residual_plus > 1e-9)
            throw FrameInvalid("plus anchor periodicity residual too large");
        if (!(fr.b_plus > C.c_plus && fr.b_plus < C.d_plus))
            throw FrameInvalid("b+ outside the plus critical interval");
        fr.a_plus = reduce_up_to(frac(lift_iter(L, fr.b_plus, qp1)), C.c_plus);
        if (!(fr.a_plus > C.d_minus && fr.a_plus < C.c_plus - 1e-13))
            throw FrameInvalid("a+ outside (d-, c+)");
    }

    // minus side mirror: pull I- back and conjugate into [d-, c+]
    {
        auto [mlo, mhi] = plateau_iterate(MM, -static_cast<int>(qm), 1e-15);
        double shift = std::floor(mlo - C.c_minus);
        mlo -= shift;
        mhi -= shift;
        if (!(mlo > C.c_minus + 1e-13 && mhi < C.d_plus))
            throw FrameInvalid("minus pullback leaves the fold window");
        double plo = psi_left(mlo), phi = psi_left(mhi);
        if (!(plo < phi))
            throw FrameInvalid("minus fold conjugacy not increasing");
        fr.b_minus = anchor(plo, phi, qm, "minus");
        fr.residual_minus =
            circle_dist(frac(lift_iter(L, fr.b_minus, qm)), frac(fr.b_minus));
        if (fr.residual_minus > 1e-9)
            throw FrameInvalid("minus anchor periodicity residual too large");
        if (!(fr.b_minus > C.d_minus && fr.b_minus < C.c_minus))
            throw FrameInvalid("b- outside the minus critical interval");
        fr.a_minus =
            C.c_minus + frac(lift_iter(L, fr.b_minus, qm1) - C.c_minus);
        if (!(fr.a_minus > C.c_minus + 1e-13 && fr.a_minus < C.d_plus))
            throw FrameInvalid("a- outside (c-, d+)");
    }

    fr.A_plus = {C.c_plus, fr.b_plus};
    fr.A_L_plus = {fr.a_plus, C.c_plus};
    fr.A_R_plus = {fr.b_plus, C.d_plus};
    fr.A_hat_plus = {fr.a_plus, C.d_plus};
    fr.A_minus = {fr.b_minus, C.c_minus};
    fr.A_L_minus = {C.d_minus, fr.b_minus};
    fr.A_R_minus = {C.c_minus, fr.a_minus};
    fr.A_hat_minus = {C.d_minus, fr.a_minus};
    fr.A = {fr.a_plus, fr.a_minus};
    fr.A_hat = {fr.a_plus - 0.1 * (fr.a_plus - C.d_minus),
                fr.a_minus + 0.1 * (C.d_plus - fr.a_minus)};
    (void)tol;
    return fr;
}

PrimaryDecomposition primary_decomposition(const Lift& L,
                                           const CriticalData& C,
                                           const ContinuedFraction& F_plus,
                                           const DecompositionFrame& frame,
                                           int k_cap) {
    if (k_cap < frame.M0)
        throw ConfigError("k_cap below the frame level");
    MonotoneLift MP = build_bound_map(L, C, Side::plus);
    PrimaryDecomposition R;
    const double wfloor = 1e-13;
    double frontier = frame.A_L_plus.lo;  // a+
    bool stop_all = false;
    for (int k = frame.M0; k <= k_cap && !stop_all; ++k) {
        if (2 * k + 1 > F_plus.k_max) {
            R.exhausted = k;
            break;
        }
        std::int64_t q0 = to_time(F_plus.q[2 * k]);
        std::int64_t q1 = to_time(F_plus.q[2 * k + 1]);
        bool certified = (2 * k + 2 <= F_plus.k_max);
        std::int64_t l_stop = certified ? to_time(F_plus.a[2 * k + 1]) : -1;
        for (std::int64_t l = 0;; ++l) {
            if (certified && l >= l_stop) break;
            std::int64_t N = q0 + l * q1;
            if (N > 200000) {
                R.exhausted = k;
                stop_all = true;
                break;
            }
            auto [ilo, ihi] = plateau_iterate(MP, -static_cast<int>(N), 1e-15);
            double shift = std::ceil(ihi - C.c_plus);
            ilo -= shift;
            ihi -= shift;
            if (ihi - ilo < wfloor) {
                R.exhausted = k;
                stop_all = true;
                break;
            }
            if (ihi > C.c_plus - 1e-13) {
                // crossed the critical point: level k cannot be completed
                R.exhausted = k;
                stop_all = true;
                break;
            }
            if (ilo < frontier - 1e-12) {
                if (k == frame.M0 && l == 0)
                    throw FrameInvalid("first pullback outside A_L+");
                R.exhausted = k;
                stop_all = true;
                break;
            }
            R.rough.push_back({{ilo, ihi}, k, l, N});
            frontier = ihi;
        }
    }
    if (R.rough.empty())
        throw PrecisionExhausted("no decomposition piece computable");

    double prev = frame.A_L_plus.lo;
    for (const auto& piece : R.rough) {
        if (piece.J.lo - prev > 1e-12) {
            R.gaps.push_back({prev, piece.J.lo});
            R.gap_ratios.push_back((piece.J.lo - prev) / piece.J.length());
        }
        prev = piece.J.hi;
    }
    if (C.c_plus - prev > 1e-12) R.gaps.push_back({prev, C.c_plus});

    R.orders_monotone = true;
    for (std::size_t i = 0; i + 1 < R.rough.size(); ++i)
        if (R.rough[i + 1].order < R.rough[i].order) R.orders_monotone = false;
    return R;
}

TailReport tail_and_cover(const Lift& L, const CriticalData& C,
                          const DecompositionFrame& frame, std::int64_t n_cap,
                          const CircleInterval& I, int n_samples,
                          std::uint64_t seed) {
    if (n_cap < 1 || n_samples < 1) throw ConfigError("bad tail budget");
    TailReport R;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<std::int64_t> cnt;
    std::int64_t tmax = 0;
    for (int i = 0; i < n_samples; ++i) {
        Probe p = probe_entry(L, frame.A, U(rng), n_cap, 1e-12);
        if (p.N < 0) {
            ++R.unresolved;
            continue;
        }
        if (p.N > tmax) tmax = p.N;
        if (static_cast<std::int64_t>(cnt.size()) <= p.N)
            cnt.resize(p.N + 1, 0);
        ++cnt[p.N];
    }
    cnt.resize(tmax + 2, 0);
    R.tail.assign(tmax + 1, 0.0);
    double inv = 1.0 / n_samples;
    std::int64_t cum = R.unresolved;
    for (std::int64_t n = tmax; n >= 0; --n) {
        cum += cnt[n + 1];
        R.tail[n] = cum * inv;
    }

    // log-linear fit of the tail between the flat head and the noise floor
    double floor_level = 20.0 * inv;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int m = 0;
    for (std::int64_t n = 1; n <= tmax; ++n) {
        if (R.tail[n] <= floor_level || R.tail[n] > 0.8) continue;
        double x = static_cast<double>(n), y = std::log(R.tail[n]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++m;
    }
    if (m >= 3) {
        double det = m * sxx - sx * sx;
        double slope = (m * sxy - sx * sy) / det;
        R.kappa_fit = std::exp(-slope);
        double vy = syy - sy * sy / m;
        double resid = vy - slope * (sxy - sx * sy / m);
        R.r_squared = vy > 0 ? 1.0 - resid / vy : 0.0;
    }

    // covering time by exact interval images (endpoint and interior
    // critical values)
    double lo = I.lo, hi = I.hi;
    R.cover_n = -1;
    bool has_crit = C.c_plus != C.c_minus;
    for (std::int64_t n = 1; n <= n_cap; ++n) {
        double vlo = L.eval(lo), vhi = L.eval(hi);
        double nlo = std::min(vlo, vhi), nhi = std::max(vlo, vhi);
        if (has_crit) {
            for (double base : {C.c_plus, C.c_minus}) {
                for (double j = std::ceil(lo - base);
                     base + j < hi; j += 1.0) {
                    if (base + j <= lo) continue;
                    double v = L.eval(base + j);
                    nlo = std::min(nlo, v);
                    nhi = std::max(nhi, v);
                }
            }
        }
        lo = nlo;
        hi = nhi;
        if (hi - lo >= 1.0) {
            R.cover_n = n;
            break;
        }
    }
    return R;
}

}  // namespace bimod
