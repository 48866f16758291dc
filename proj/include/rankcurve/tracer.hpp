#pragma once

// Companion-curve tracing: eigenvector direction selection on the stability
// matrix, coupled stepping of the guiding point and the curve point, tube-exit
// monitoring with re-tube recovery, stall detection, branch assembly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "rankcurve/refine.hpp"
#include "rankcurve/witness.hpp"

namespace rankcurve {

struct TraceConfig {
    double beta = 1e4;
    double lambda = 0.1;       // tube-move contraction
    double step = 0.01;        // h
    int n_points = 200;        // N, per tracing direction
    double eps_residual = 1e-3;
    double eig_unit_window = 0.5;
    double eig_floor = 0.1;
    std::uint64_t seed = 0;
    int n_starts = 500;
    bool both_directions = true;

    void validate() const {
        if (!(beta > 0.0) || !(lambda > 0.0) || !(lambda < 1.0) || !(step > 0.0) ||
            n_points < 1 || !(eps_residual > 0.0) || !(eig_unit_window > 0.0) ||
            !(eig_floor > 0.0) || n_starts < 1)
            throw Error("TraceConfig: parameter out of range");
    }
};

struct TraceStep {
    std::vector<double> x;
    std::vector<double> a;
    double eigenvalue_c = 0.0;
    double min_eigenvalue = 0.0;
    int retube_count = 0;
};

enum class Termination { BudgetReached, ClosedLoop, Stalled, DirectionAmbiguous, SingularFailure };

inline const char* termination_name(Termination t) {
    switch (t) {
    case Termination::BudgetReached: return "BudgetReached";
    case Termination::ClosedLoop: return "ClosedLoop";
    case Termination::Stalled: return "Stalled";
    case Termination::DirectionAmbiguous: return "DirectionAmbiguous";
    case Termination::SingularFailure: return "SingularFailure";
    }
    return "?";
}

struct TracedBranch {
    std::vector<std::vector<double>> curve_points;
    std::vector<std::vector<double>> companion_points; // index-aligned with curve_points
    std::vector<TraceStep> steps;                      // accepted steps, in order
    CriticalPoint origin_witness;
    Termination termination = Termination::BudgetReached;
};

// anchor update scale: step 6.3 uses h*c, but c ~ 8*beta*delta^2 blows up at
// isolated points; the clamp keeps the companion polyline at trace scale
inline constexpr double kAnchorStepCap = 10.0;

// select the eigenpair of S(x) with eigenvalue closest to 1; sign follows
// prev_dir when given, else the convention sign (first nonzero positive)
inline std::pair<std::vector<double>, double>
tracing_direction(const PenaltyProblem& prob, const std::vector<double>& x,
                  const std::optional<std::vector<double>>& prev_dir, const TraceConfig& cfg) {
    EigenDecomposition eig = sym_eigen(stability_matrix(prob, x));
    const int n = static_cast<int>(eig.values.size());
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (std::fabs(eig.values[i] - 1.0) < std::fabs(eig.values[best] - 1.0))
            best = i;
    double c = eig.values[best];
    for (int i = 0; i < n; ++i) {
        if (i == best)
            continue;
        double ci = eig.values[i];
        if (std::fabs(ci - 1.0) <= cfg.eig_unit_window &&
            std::fabs(c - ci) <= 0.1 * std::max(std::fabs(c), std::fabs(ci)))
            throw DirectionAmbiguousError("two eigenvalues near 1");
    }
    std::vector<double> dir = eigen_column(eig, best);
    if (prev_dir && dot(dir, *prev_dir) < 0.0)
        for (auto& v : dir)
            v = -v;
    return {std::move(dir), c};
}

namespace detail {

struct TraceLoop {
    const PolySystem& sys;
    TraceConfig cfg;
    PenaltyProblem prob; // anchor mutated as the guiding point moves

    std::vector<double> x, a;
    double tube_ref = 0.0;
    std::optional<std::vector<double>> prev_dir;
    std::vector<double> x_last_retube;
    int retube_streak = 0;
    int retubes = 0;
    TracedBranch out;

    TraceLoop(const PolySystem& s, const TraceConfig& c)
        : sys(s), cfg(c), prob(s, std::vector<double>(s.n_vars, 0.0), c.beta) {}

    bool retube() { // false => stalled
        TubeMove mv = move_toward_tube(sys, x, a, cfg.lambda, cfg.beta);
        if (dist2(mv.x1, x_last_retube) < cfg.step / 10.0)
            ++retube_streak;
        else
            retube_streak = 0;
        x = mv.x1;
        a = mv.a1;
        x_last_retube = x;
        tube_ref = std::max(dist2(a, x), cfg.step / 10.0);
        ++retubes;
        return retube_streak < 3;
    }

    void record(double c, double min_eig) {
        TraceStep st;
        st.x = x;
        st.a = a;
        st.eigenvalue_c = c;
        st.min_eigenvalue = min_eig;
        st.retube_count = retubes;
        out.steps.push_back(std::move(st));
        out.curve_points.push_back(x);
        out.companion_points.push_back(a);
    }

    Termination run(const CriticalPoint& witness, const std::vector<double>& anchor0,
                    int direction_sign) {
        const double h = cfg.step;
        x = witness.x;
        a = anchor0;
        try {
            TubeMove mv = move_toward_tube(sys, x, a, cfg.lambda, cfg.beta);
            x = mv.x1;
            a = mv.a1;
        } catch (const Error&) {
            return Termination::SingularFailure;
        }
        x_last_retube = x;
        tube_ref = std::max(dist2(a, x), h / 10.0);
        out.curve_points.push_back(x);
        out.companion_points.push_back(a);

        const long iter_cap = 30L * cfg.n_points;
        long iter = 0;
        while (static_cast<int>(out.curve_points.size()) < cfg.n_points) {
            if (++iter > iter_cap)
                return Termination::Stalled;
            try {
                if (dist2(a, x) > tube_ref + 2.0 * h) {
                    if (!retube())
                        return Termination::Stalled;
                    continue;
                }
                prob.anchor = a;
                std::vector<double> dir;
                double c;
                try {
                    auto dc = tracing_direction(prob, x, prev_dir, cfg);
                    dir = std::move(dc.first);
                    c = dc.second;
                } catch (const DirectionAmbiguousError&) {
                    return Termination::DirectionAmbiguous;
                }
                if (std::fabs(c - 1.0) > cfg.eig_unit_window) {
                    // no tangent-like eigenvalue: guiding point out of the tube
                    if (!retube())
                        return Termination::Stalled;
                    continue;
                }
                if (!prev_dir && direction_sign < 0)
                    for (auto& v : dir)
                        v = -v;

                double cs = std::clamp(c, -kAnchorStepCap, kAnchorStepCap);
                bool accepted = false;
                std::vector<double> xr, an;
                double hs = h;
                for (int attempt = 0; attempt < 7 && !accepted; ++attempt, hs *= 0.5) {
                    std::vector<double> xn = vaxpy(x, hs, dir);
                    an = vaxpy(a, hs * cs, dir);
                    prob.anchor = an;
                    try {
                        CriticalPoint cp =
                            newton_refine(prob, xn, 1e-10 * (1.0 + norm2(an)), 50);
                        if (dist2(cp.x, x) <= 3.0 * h && cp.residual <= cfg.eps_residual) {
                            xr = std::move(cp.x);
                            accepted = true;
                        }
                    } catch (const Error&) {
                        // halve and retry
                    }
                }
                if (!accepted) {
                    if (!retube())
                        return Termination::Stalled;
                    continue;
                }
                if (dist2(xr, x_last_retube) >= h / 10.0)
                    retube_streak = 0;
                x = std::move(xr);
                a = std::move(an);
                prev_dir = dir;
                prob.anchor = a;
                EigenDecomposition eig = sym_eigen(stability_matrix(prob, x));
                record(c, eig.values.front());
                if (eig.values.front() < cfg.eig_floor) {
                    if (!retube())
                        return Termination::Stalled;
                    continue;
                }
                if (out.curve_points.size() > 5 &&
                    dist2(x, out.curve_points.front()) < h / 2.0)
                    return Termination::ClosedLoop;
            } catch (const Error&) {
                return Termination::SingularFailure;
            }
        }
        return Termination::BudgetReached;
    }
};

inline int termination_severity(Termination t) {
    switch (t) {
    case Termination::SingularFailure: return 4;
    case Termination::DirectionAmbiguous: return 3;
    case Termination::Stalled: return 2;
    case Termination::ClosedLoop: return 1;
    case Termination::BudgetReached: return 0;
    }
    return 0;
}

} // namespace detail

inline TracedBranch trace_branch(const PolySystem& sys, const CriticalPoint& witness,
                                 const std::vector<double>& anchor0, const TraceConfig& cfg,
                                 int direction_sign) {
    cfg.validate();
    detail::TraceLoop loop(sys, cfg);
    loop.out.origin_witness = witness;
    loop.out.termination = loop.run(witness, anchor0, direction_sign >= 0 ? +1 : -1);
    return loop.out;
}

namespace detail {

inline TracedBranch merge_halves(TracedBranch minus, TracedBranch plus) {
    TracedBranch out;
    out.origin_witness = plus.origin_witness;
    out.termination = termination_severity(minus.termination) > termination_severity(plus.termination)
                          ? minus.termination
                          : plus.termination;
    for (size_t i = minus.curve_points.size(); i > 1; --i) {
        out.curve_points.push_back(std::move(minus.curve_points[i - 1]));
        out.companion_points.push_back(std::move(minus.companion_points[i - 1]));
    }
    for (size_t i = 0; i < plus.curve_points.size(); ++i) {
        out.curve_points.push_back(std::move(plus.curve_points[i]));
        out.companion_points.push_back(std::move(plus.companion_points[i]));
    }
    out.steps = std::move(minus.steps);
    std::reverse(out.steps.begin(), out.steps.end());
    for (auto& s : plus.steps)
        out.steps.push_back(std::move(s));
    return out;
}

inline std::vector<std::vector<double>> sample_points(const std::vector<std::vector<double>>& pts,
                                                      size_t count) {
    std::vector<std::vector<double>> out;
    if (pts.empty())
        return out;
    if (pts.size() <= count)
        return pts;
    for (size_t i = 0; i < count; ++i)
        out.push_back(pts[i * (pts.size() - 1) / (count - 1)]);
    return out;
}

inline double sampled_hausdorff(const std::vector<std::vector<double>>& a,
                                const std::vector<std::vector<double>>& b) {
    auto sa = sample_points(a, 20);
    auto sb = sample_points(b, 20);
    double worst = 0.0;
    for (const auto& p : sa) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : sb)
            best = std::min(best, dist2(p, q));
        worst = std::max(worst, best);
    }
    for (const auto& q : sb) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : sa)
            best = std::min(best, dist2(p, q));
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace detail

struct TraceResult {
    Verdict verdict;
    std::vector<TracedBranch> branches;
    std::vector<double> anchor;
    WitnessSet witness_set;
};

// Full pipeline from an explicit anchor: emptiness test, multistart witness
// search, residual filter, both-direction tracing, branch dedup.
inline TraceResult trace_all_from(const PolySystem& sys, const TraceConfig& cfg,
                                  const std::vector<double>& anchor) {
    cfg.validate();
    TraceResult res;
    res.anchor = anchor;
    res.verdict = emptiness_test(sys, cfg.beta, cfg.n_starts, cfg.seed);
    if (res.verdict.kind == VerdictKind::Empty)
        return res;

    PenaltyProblem prob(sys, anchor, cfg.beta);
    res.witness_set = find_witnesses(prob, cfg.n_starts, default_multistart_radius(anchor),
                                     cfg.eps_residual, splitmix64(cfg.seed + 1));
    if (res.witness_set.witnesses.empty())
        return res;

    std::vector<TracedBranch> raw;
    for (const auto& w : res.witness_set.witnesses) {
        TracedBranch plus = trace_branch(sys, w, anchor, cfg, +1);
        if (cfg.both_directions && plus.termination != Termination::ClosedLoop) {
            TracedBranch minus = trace_branch(sys, w, anchor, cfg, -1);
            raw.push_back(detail::merge_halves(std::move(minus), std::move(plus)));
        } else {
            raw.push_back(std::move(plus));
        }
    }

    for (auto& b : raw) {
        bool dup = false;
        for (auto& kept : res.branches) {
            if (detail::sampled_hausdorff(b.curve_points, kept.curve_points) < 2.0 * cfg.step) {
                if (b.curve_points.size() > kept.curve_points.size())
                    kept = std::move(b);
                dup = true;
                break;
            }
        }
        if (!dup)
            res.branches.push_back(std::move(b));
    }
    return res;
}

inline TraceResult trace_all(const PolySystem& sys, const TraceConfig& cfg) {
    Rng rng(splitmix64(cfg.seed) ^ 0x243f6a8885a308d3ULL);
    return trace_all_from(sys, cfg, rng.ball_point(sys.n_vars, 1.0));
}

} // namespace rankcurve
