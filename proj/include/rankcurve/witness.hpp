#pragma once

// Witness-point discovery: seeded multistart damped Newton on the gradient
// system (stand-in for a complete homotopy solver; best-effort coverage),
// residual filtering, the homogenized emptiness test, and the
// generic-direction degree-index estimate.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rankcurve/penalty.hpp"
#include "rankcurve/rng.hpp"

namespace rankcurve {

namespace detail {

inline int worker_count() {
    if (const char* env = std::getenv("RANKCURVE_THREADS")) {
        int v = std::atoi(env);
        if (v <= 1)
            return 1;
        return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// runs fn(i) for i in [0,n); results must be written to per-index slots so
// parallel and serial schedules agree
template <typename Fn> void parallel_for(int n, Fn&& fn) {
    int workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w]() {
            for (int i = w; i < n; i += workers)
                fn(i);
        });
    for (auto& t : pool)
        t.join();
}

} // namespace detail

struct WitnessSet {
    std::vector<double> anchor;
    double beta = 0.0;
    std::vector<CriticalPoint> all_critical;
    std::vector<CriticalPoint> witnesses; // residual < eps, subset of all_critical
    double eps = 0.0;
};

enum class VerdictKind { Empty, Unknown };

struct Verdict {
    VerdictKind kind = VerdictKind::Unknown;
    // reported on the paper's scale: beta*sum(fbar^2) + ||x-a||^2 (= 2*mu_value);
    // Empty requires mu_bar_min > 2, sound since homogenized zero sets are
    // antipodally symmetric and the anchor lies in the open unit ball
    double mu_bar_min = std::numeric_limits<double>::infinity();
    std::vector<double> minimizer;
};

inline const char* verdict_name(VerdictKind k) {
    return k == VerdictKind::Empty ? "Empty" : "Unknown";
}

// Seeded uniform starts in the ball of given radius around the anchor, each
// run through damped Newton; converged points are deduplicated in start order
// (keeps the seed-prefix superset property) and sorted by mu ascending.
inline std::vector<CriticalPoint> multistart_critical_points(const PenaltyProblem& prob,
                                                             int n_starts, double radius,
                                                             std::uint64_t seed) {
    if (n_starts < 1)
        throw Error("multistart: n_starts must be >= 1");
    if (!(radius > 0.0))
        throw Error("multistart: radius must be positive");
    const int n = prob.n();
    const double tol = prob.default_tol();

    std::vector<std::vector<double>> starts(n_starts);
    Rng rng(seed);
    for (int i = 0; i < n_starts; ++i) {
        std::vector<double> p = rng.ball_point(n, radius);
        for (int j = 0; j < n; ++j)
            p[j] += prob.anchor[j];
        starts[i] = std::move(p);
    }

    std::vector<std::optional<CriticalPoint>> slots(n_starts);
    detail::parallel_for(n_starts, [&](int i) {
        std::vector<double> x = starts[i];
        if (damped_newton(prob, x, tol))
            slots[i] = make_critical_point(prob, std::move(x));
    });

    const double dedup = 1e-6 * (1.0 + radius);
    std::vector<CriticalPoint> kept;
    for (int i = 0; i < n_starts; ++i) {
        if (!slots[i])
            continue;
        bool dup = false;
        for (const auto& k : kept)
            if (dist2(k.x, slots[i]->x) <= dedup) {
                dup = true;
                break;
            }
        if (!dup)
            kept.push_back(std::move(*slots[i]));
    }
    std::stable_sort(kept.begin(), kept.end(),
                     [](const CriticalPoint& a, const CriticalPoint& b) { return a.mu < b.mu; });
    return kept;
}

inline std::vector<CriticalPoint> filter_witnesses(const std::vector<CriticalPoint>& points,
                                                   double eps) {
    if (!(eps > 0.0))
        throw Error("filter_witnesses: eps must be positive");
    std::vector<CriticalPoint> out;
    for (const auto& p : points)
        if (p.residual < eps)
            out.push_back(p);
    return out;
}

inline WitnessSet find_witnesses(const PenaltyProblem& prob, int n_starts, double radius,
                                 double eps, std::uint64_t seed) {
    WitnessSet ws;
    ws.anchor = prob.anchor;
    ws.beta = prob.beta;
    ws.eps = eps;
    ws.all_critical = multistart_critical_points(prob, n_starts, radius, seed);
    ws.witnesses = filter_witnesses(ws.all_critical, eps);
    return ws;
}

inline double default_multistart_radius(const std::vector<double>& anchor) {
    return 5.0 * (1.0 + norm2(anchor));
}

// Homogenize, draw the anchor in the open unit ball of R^{n+1}, minimize the
// homogenized penalty by multistart. Empty only when no found point has the
// paper-scale objective <= 2; heuristic-certified (global minimality is not
// proven by a multistart).
inline Verdict emptiness_test(const PolySystem& sys, double beta, int n_starts,
                              std::uint64_t seed) {
    if (!(beta > 0.0))
        throw Error("emptiness_test: beta must be positive");
    PolySystem hom = homogenize(sys);
    Rng rng(splitmix64(seed) ^ 0x9d2c5680u);
    std::vector<double> anchor = rng.ball_point(hom.n_vars, 1.0);
    PenaltyProblem prob(hom, anchor, beta);
    std::vector<CriticalPoint> pts =
        multistart_critical_points(prob, n_starts, default_multistart_radius(anchor), seed);
    Verdict v;
    for (const auto& p : pts) {
        double scaled = 2.0 * p.mu;
        if (scaled < v.mu_bar_min) {
            v.mu_bar_min = scaled;
            v.minimizer = p.x;
        }
    }
    v.kind = (!pts.empty() && v.mu_bar_min > 2.0) ? VerdictKind::Empty : VerdictKind::Unknown;
    return v;
}

// Max over random unit directions of the trailing degree of t -> f_i(p + t v),
// maximized over i; a lower bound on the true degree index. The coefficient
// tolerance is scale-aware so near-witness points (where f_i(p) is small but
// nonzero) report the on-curve order rather than 0.
inline int degree_index_estimate(const PolySystem& sys, const std::vector<double>& p, int trials,
                                 std::uint64_t seed) {
    if (trials < 1)
        throw Error("degree_index_estimate: trials must be >= 1");
    if (static_cast<int>(p.size()) != sys.n_vars)
        throw DimensionMismatch("degree_index_estimate: point length mismatch");
    Rng rng(splitmix64(seed) ^ 0x6a09e667u);
    int best = 0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> v = rng.unit_vector(sys.n_vars);
        for (const auto& poly : sys.polys) {
            std::vector<double> coeffs = poly.restrict_to_ray(p, v);
            double m = 0.0;
            for (double c : coeffs)
                m = std::max(m, std::fabs(c));
            if (m == 0.0)
                continue;
            double c0 = std::fabs(coeffs[0]);
            double tol = std::max(1e-8 * m, 4.0 * std::sqrt(c0 * m));
            if (c0 > 0.0 && c0 <= tol) {
                // off-curve contamination: orders at the sqrt(c0) scale are noise
                std::optional<int> deg = trailing_degree(coeffs, tol);
                if (deg)
                    best = std::max(best, *deg);
            } else {
                std::optional<int> deg = trailing_degree(coeffs, 1e-8 * m);
                if (deg)
                    best = std::max(best, *deg);
            }
        }
    }
    return best;
}

inline double predicted_exponent(int degree_index) {
    if (degree_index < 1)
        return std::numeric_limits<double>::quiet_NaN();
    return 1.0 / (2.0 * degree_index - 1.0);
}

} // namespace rankcurve
