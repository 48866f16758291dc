#pragma once

// beta-continuation: the homotopy H(x,t) = t(x-a) + J^t f with t = 1/beta,
// tracked by an Euler predictor and Newton corrector. Algorithm
// "move towards tubular neighborhood" contracts the anchor and re-tracks.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "rankcurve/penalty.hpp"

namespace rankcurve {

enum class PathStatus { Completed, SingularStop, StepUnderflow };

struct HomotopyPath {
    std::vector<std::pair<double, std::vector<double>>> samples; // (t, x), t monotone
    PathStatus status = PathStatus::Completed;

    const std::vector<double>& end() const { return samples.back().second; }
};

struct TubeMove {
    std::vector<double> x1;
    std::vector<double> a1;
    double lambda = 0.0; // contraction actually used (may be halved on retry)
};

namespace detail {

inline std::vector<double> homotopy_value(const PolySystem& sys, const std::vector<double>& anchor,
                                          const std::vector<double>& x, double t) {
    const int n = sys.n_vars;
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i)
        h[i] = t * (x[i] - anchor[i]);
    std::vector<double> gi;
    for (const auto& p : sys.polys) {
        double f = p.evaluate(x);
        p.grad(x, gi);
        for (int i = 0; i < n; ++i)
            h[i] += f * gi[i];
    }
    return h;
}

// dH/dx = t*I + A (same A as the stability matrix, without the beta factor)
inline Mat homotopy_jacobian(const PolySystem& sys, const std::vector<double>& x, double t) {
    PenaltyProblem tmp(sys, std::vector<double>(sys.n_vars, 0.0), 1.0);
    Mat A = penalty_matrix_a(tmp, x);
    for (int i = 0; i < sys.n_vars; ++i)
        A(i, i) += t;
    return A;
}

} // namespace detail

// Track H(x,t)=0 from (x_start, t1) to t0. Adaptive step: halve on corrector
// failure, double after 3 easy successes, capped at |t1-t0|/8 and at t/2 per
// step (the halving schedule keeps decade-spanning sweeps paced). Endpoint is
// polished with a tighter corrector pass.
inline HomotopyPath track_beta(const PolySystem& sys, const std::vector<double>& anchor,
                               const std::vector<double>& x_start, double t1, double t0) {
    if (!(t1 > 0.0) || !(t0 > 0.0))
        throw Error("track_beta: t must be positive");
    HomotopyPath path;
    std::vector<double> x = x_start;
    if (norm2(detail::homotopy_value(sys, anchor, x, t1)) > 1e-6)
        throw InvalidStart("track_beta: initial homotopy residual exceeds 1e-6");
    path.samples.emplace_back(t1, x);
    if (t1 == t0)
        return path;

    const double ctol = 1e-9 * (1.0 + norm2(anchor));
    const double cap = std::fabs(t1 - t0) / 8.0;
    const double sgn = (t0 < t1) ? -1.0 : 1.0;
    double dt = cap / 8.0;
    double t = t1;
    int easy = 0;

    while (t != t0) {
        double step = std::min({dt, std::fabs(t - t0), t / 2.0});
        if (step < 1e-14 * std::max(t, t0)) {
            path.status = PathStatus::StepUnderflow;
            return path;
        }
        double tn = (std::fabs(t - t0) <= step) ? t0 : t + sgn * step;
        bool ok = false;
        std::vector<double> xp;
        try {
            std::vector<double> rhs(x.size());
            for (size_t i = 0; i < x.size(); ++i)
                rhs[i] = -(x[i] - anchor[i]);
            std::vector<double> dxdt = lu_solve(detail::homotopy_jacobian(sys, x, t), rhs);
            xp = vaxpy(x, tn - t, dxdt);
            for (int it = 0; it < 20; ++it) {
                std::vector<double> r = detail::homotopy_value(sys, anchor, xp, tn);
                if (norm2(r) <= ctol) {
                    ok = true;
                    break;
                }
                for (auto& v : r)
                    v = -v;
                std::vector<double> d = lu_solve(detail::homotopy_jacobian(sys, xp, tn), r);
                xp = vadd(xp, d);
            }
        } catch (const SingularMatrix&) {
            path.status = PathStatus::SingularStop;
            return path;
        }
        if (!ok) {
            dt *= 0.5;
            easy = 0;
            continue;
        }
        t = tn;
        x = std::move(xp);
        path.samples.emplace_back(t, x);
        if (++easy >= 3) {
            dt = std::min(2.0 * dt, cap);
            easy = 0;
        }
    }

    // endpoint polish
    const double ptol = 1e-13 * (1.0 + norm2(anchor));
    try {
        for (int it = 0; it < 30; ++it) {
            std::vector<double> r = detail::homotopy_value(sys, anchor, x, t0);
            if (norm2(r) <= ptol)
                break;
            for (auto& v : r)
                v = -v;
            x = vadd(x, lu_solve(detail::homotopy_jacobian(sys, x, t0), r));
        }
    } catch (const SingularMatrix&) {
        // keep the last corrector-accepted endpoint
    }
    path.samples.back() = {t0, x};
    return path;
}

// a1 = (1-lambda) x0 + lambda a0, beta1 = lambda beta0; x0 is exactly critical
// for (a1, beta1), so track t from 1/beta1 back to 1/beta0. One retry with
// lambda/2 on a singular stop.
inline TubeMove move_toward_tube(const PolySystem& sys, const std::vector<double>& x0,
                                 const std::vector<double>& a0, double lambda, double beta0) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw Error("move_toward_tube: lambda must lie in (0,1)");
    double lam = lambda;
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::vector<double> a1(x0.size());
        for (size_t i = 0; i < x0.size(); ++i)
            a1[i] = (1.0 - lam) * x0[i] + lam * a0[i];
        HomotopyPath path = track_beta(sys, a1, x0, 1.0 / (lam * beta0), 1.0 / beta0);
        if (path.status == PathStatus::Completed)
            return TubeMove{path.end(), std::move(a1), lam};
        if (path.status == PathStatus::StepUnderflow && attempt == 1)
            throw NoConvergence("move_toward_tube: step underflow");
        lam *= 0.5;
    }
    throw SingularMatrix("move_toward_tube: singular after lambda retry");
}

// Track a critical point across an ascending beta ladder; the caller supplies
// the distance-to-curve oracle. Returns the least-squares slope of
// log(distance) against log(beta); NaN marks an exact (zero-distance) seed.
inline double convergence_slope(const PolySystem& sys, const std::vector<double>& anchor,
                                const std::vector<double>& x_seed, const std::vector<double>& betas,
                                const std::function<double(const std::vector<double>&)>& oracle) {
    if (betas.size() < 3)
        throw Error("convergence_slope: need at least 3 beta values");
    for (size_t i = 1; i < betas.size(); ++i)
        if (!(betas[i] > betas[i - 1]))
            throw Error("convergence_slope: betas must ascend");
    std::vector<double> x = x_seed;
    std::vector<double> logb, logd;
    for (size_t i = 0; i < betas.size(); ++i) {
        if (i > 0) {
            HomotopyPath p = track_beta(sys, anchor, x, 1.0 / betas[i - 1], 1.0 / betas[i]);
            if (p.status != PathStatus::Completed)
                throw NoConvergence("convergence_slope: tracking failed along the ladder");
            x = p.end();
        } else {
            PenaltyProblem prob(sys, anchor, betas[0]);
            CriticalPoint cp = newton_refine(prob, x, prob.default_tol());
            x = cp.x;
        }
        double d = oracle(x);
        if (!(d > 1e-300))
            return std::numeric_limits<double>::quiet_NaN(); // exact
        logb.push_back(std::log(betas[i]));
        logd.push_back(std::log(d));
    }
    double mb = 0.0, md = 0.0;
    for (size_t i = 0; i < logb.size(); ++i) {
        mb += logb[i];
        md += logd[i];
    }
    mb /= logb.size();
    md /= logd.size();
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < logb.size(); ++i) {
        num += (logb[i] - mb) * (logd[i] - md);
        den += (logb[i] - mb) * (logb[i] - mb);
    }
    return num / den;
}

} // namespace rankcurve
