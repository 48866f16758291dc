#pragma once

// Penalty objective mu = (beta*sum f_i^2 + ||x-a||^2)/2, its gradient
// system G(x) = (x-a) + beta*J^t f, the symmetric matrix S = beta*A + I
// with A = d(J^t f)/dx, and Newton refinement of critical points.

#include <cmath>
#include <limits>
#include <vector>

#include "rankcurve/linalg.hpp"
#include "rankcurve/poly.hpp"

namespace rankcurve {

struct PenaltyProblem {
    PolySystem sys;
    std::vector<double> anchor;
    double beta = 1e4;

    PenaltyProblem() = default;
    PenaltyProblem(PolySystem s, std::vector<double> a, double b)
        : sys(std::move(s)), anchor(std::move(a)), beta(b) {
        if (static_cast<int>(anchor.size()) != sys.n_vars)
            throw DimensionMismatch("anchor length does not match system");
        if (!(beta > 0.0) || !std::isfinite(beta))
            throw Error("beta must be finite and positive");
    }

    int n() const { return sys.n_vars; }

    double default_tol() const { return 1e-10 * (1.0 + norm2(anchor)); }
};

struct CriticalPoint {
    std::vector<double> x;
    double residual = 0.0;  // ||f(x)||_2, recomputed at construction
    double mu = 0.0;
    double grad_norm = 0.0; // ||G(x)||_2 at acceptance
};

inline double mu_value(const PenaltyProblem& prob, const std::vector<double>& x) {
    if (x.size() != prob.anchor.size())
        throw DimensionMismatch("mu_value: point length mismatch");
    double fs = 0.0;
    for (const auto& p : prob.sys.polys) {
        double v = p.evaluate(x);
        fs += v * v;
    }
    double ds = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - prob.anchor[i];
        ds += d * d;
    }
    return (prob.beta * fs + ds) / 2.0;
}

inline std::vector<double> grad_system(const PenaltyProblem& prob, const std::vector<double>& x) {
    if (x.size() != prob.anchor.size())
        throw DimensionMismatch("grad_system: point length mismatch");
    const int n = prob.n();
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = x[i] - prob.anchor[i];
    std::vector<double> gi;
    for (const auto& p : prob.sys.polys) {
        double f = p.evaluate(x);
        p.grad(x, gi);
        for (int i = 0; i < n; ++i)
            g[i] += prob.beta * f * gi[i];
    }
    return g;
}

// double-precision magnitude of the G evaluation; Newton cannot be expected
// to push ||G|| below a small multiple of eps * this
inline double grad_system_magnitude(const PenaltyProblem& prob, const std::vector<double>& x) {
    double m = norm2(x) + norm2(prob.anchor);
    std::vector<double> gi;
    std::vector<double> ax(x.size());
    for (size_t i = 0; i < x.size(); ++i)
        ax[i] = std::fabs(x[i]);
    for (const auto& p : prob.sys.polys) {
        double fa = p.evaluate_abs(ax);
        p.grad(ax, gi);
        double ga = 0.0;
        for (double v : gi)
            ga += std::fabs(v);
        m += prob.beta * fa * ga;
    }
    return m;
}

inline double newton_floor(const PenaltyProblem& prob, const std::vector<double>& x) {
    return 32.0 * std::numeric_limits<double>::epsilon() * grad_system_magnitude(prob, x);
}

// d(J^t f)/dx without the beta scaling: A_ij = sum_l (df_l/dx_i df_l/dx_j + f_l d2f_l/dx_i dx_j)
inline Mat penalty_matrix_a(const PenaltyProblem& prob, const std::vector<double>& x) {
    const int n = prob.n();
    Mat A(n, n);
    std::vector<double> gi;
    for (const auto& p : prob.sys.polys) {
        double f = p.evaluate(x);
        p.grad(x, gi);
        std::vector<double> h = p.hessian(x);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                A(i, j) += gi[i] * gi[j] + f * h[static_cast<size_t>(i) * n + j];
    }
    return A;
}

// S = beta*A + I, symmetrized by averaging with its transpose
inline Mat stability_matrix(const PenaltyProblem& prob, const std::vector<double>& x) {
    if (x.size() != prob.anchor.size())
        throw DimensionMismatch("stability_matrix: point length mismatch");
    const int n = prob.n();
    Mat A = penalty_matrix_a(prob, x);
    Mat S(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            S(i, j) = 0.5 * (prob.beta * A(i, j) + prob.beta * A(j, i)) + (i == j ? 1.0 : 0.0);
    return S;
}

inline CriticalPoint make_critical_point(const PenaltyProblem& prob, std::vector<double> x) {
    CriticalPoint cp;
    cp.grad_norm = norm2(grad_system(prob, x));
    cp.residual = prob.sys.residual(x);
    cp.mu = mu_value(prob, x);
    cp.x = std::move(x);
    return cp;
}

// Full-step Newton on G with S as its Jacobian. Starts are near-solutions by
// construction inside the tracer; far starts go through damped_newton below.
inline CriticalPoint newton_refine(const PenaltyProblem& prob, const std::vector<double>& x0,
                                   double tol, int max_iter = 50) {
    if (!(tol > 0.0))
        throw Error("newton_refine: tol must be positive");
    std::vector<double> x = x0;
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> g = grad_system(prob, x);
        double ng = norm2(g);
        if (ng <= tol || ng <= newton_floor(prob, x))
            return make_critical_point(prob, std::move(x));
        for (auto& v : g)
            v = -v;
        std::vector<double> dx = lu_solve(stability_matrix(prob, x), g);
        for (size_t i = 0; i < x.size(); ++i)
            x[i] += dx[i];
        if (norm2(x) > 1e8)
            throw DivergedToInfinity("newton_refine: iterate norm exceeded 1e8");
    }
    double ng = norm2(grad_system(prob, x));
    if (ng <= tol || ng <= newton_floor(prob, x))
        return make_critical_point(prob, std::move(x));
    throw NoConvergence("newton_refine: max iterations reached");
}

// Armijo-damped Newton on ||G||^2 for far starts (multistart witness search).
// Returns false instead of throwing: non-convergent starts are dropped data.
inline bool damped_newton(const PenaltyProblem& prob, std::vector<double>& x, double tol,
                          int max_iter = 150) {
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> g = grad_system(prob, x);
        double ng = norm2(g);
        if (ng <= tol || ng <= newton_floor(prob, x))
            return true;
        std::vector<double> rhs = g;
        for (auto& v : rhs)
            v = -v;
        std::vector<double> dx;
        try {
            dx = lu_solve(stability_matrix(prob, x), rhs);
        } catch (const SingularMatrix&) {
            return false;
        }
        double phi0 = ng * ng;
        double alpha = 1.0;
        bool stepped = false;
        while (alpha > 1e-12) {
            std::vector<double> xn = vaxpy(x, alpha, dx);
            double phi = 0.0;
            {
                std::vector<double> gn = grad_system(prob, xn);
                phi = dot(gn, gn);
            }
            if (phi <= (1.0 - 2e-4 * alpha) * phi0) {
                x = std::move(xn);
                stepped = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!stepped)
            return false;
        if (norm2(x) > 1e8)
            return false;
    }
    double ng = norm2(grad_system(prob, x));
    return ng <= tol || ng <= newton_floor(prob, x);
}

} // namespace rankcurve
