#pragma once

// Test-only oracles, independent of the library's computation paths:
// central finite differences, random polynomial generation, characteristic
// polynomial root bracketing for small symmetric matrices.

#include <cmath>
#include <functional>
#include <vector>

#include "rankcurve/linalg.hpp"
#include "rankcurve/poly.hpp"
#include "rankcurve/rng.hpp"

namespace oracles {

using rankcurve::Mat;
using rankcurve::Polynomial;
using rankcurve::Rng;

inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       const std::vector<double>& x, double h = 1e-6) {
    std::vector<double> g(x.size());
    std::vector<double> xp = x, xm = x;
    for (size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return g;
}

// finite differences of an exact gradient: row i = d(grad)/dx_i
inline Mat fd_jacobian_of(const std::function<std::vector<double>(const std::vector<double>&)>& g,
                          const std::vector<double>& x, double h = 1e-6) {
    const int n = static_cast<int>(x.size());
    Mat J(n, n);
    std::vector<double> xp = x, xm = x;
    for (int i = 0; i < n; ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        std::vector<double> gp = g(xp), gm = g(xm);
        for (int r = 0; r < n; ++r)
            J(r, i) = (gp[r] - gm[r]) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return J;
}

inline Polynomial random_polynomial(Rng& rng, int n_vars, int max_degree, int n_terms,
                                    double coeff_lo = -10.0, double coeff_hi = 10.0) {
    Polynomial p(n_vars);
    for (int t = 0; t < n_terms; ++t) {
        std::vector<int> e(n_vars, 0);
        int budget = static_cast<int>(rng.uniform(0.0, max_degree + 0.999));
        for (int b = 0; b < budget; ++b)
            e[static_cast<int>(rng.uniform(0.0, n_vars - 1e-9))] += 1;
        double c = rng.uniform(coeff_lo, coeff_hi);
        if (c == 0.0)
            c = 1.0;
        p.add_term(c, std::move(e));
    }
    p.normalize();
    return p;
}

inline std::vector<double> random_point(Rng& rng, int n, double lo = -2.0, double hi = 2.0) {
    std::vector<double> x(n);
    for (auto& v : x)
        v = rng.uniform(lo, hi);
    return x;
}

// eigenvalues of symmetric 2x2/3x3 by characteristic-polynomial bisection,
// bracketed by the Gershgorin bound
inline std::vector<double> charpoly_eigenvalues(const Mat& S) {
    const int n = S.rows;
    auto det_shift = [&](double lam) {
        if (n == 2)
            return (S(0, 0) - lam) * (S(1, 1) - lam) - S(0, 1) * S(1, 0);
        double a = S(0, 0) - lam, b = S(0, 1), c = S(0, 2);
        double d = S(1, 0), e = S(1, 1) - lam, f = S(1, 2);
        double g = S(2, 0), h = S(2, 1), i = S(2, 2) - lam;
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    };
    double r = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            s += std::fabs(S(i, j));
        r = std::max(r, s);
    }
    r += 1.0;
    // char poly sign: det(S - lam I) has sign (-1)^n at +inf
    std::vector<double> grid;
    const int G = 20000;
    for (int i = 0; i <= G; ++i)
        grid.push_back(-r + 2.0 * r * i / G);
    std::vector<double> roots;
    for (int i = 0; i + 1 <= G; ++i) {
        double fa = det_shift(grid[i]), fb = det_shift(grid[i + 1]);
        if (fa == 0.0)
            roots.push_back(grid[i]);
        if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) {
            double lo = grid[i], hi = grid[i + 1];
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = det_shift(mid);
                if ((fm < 0) == (fa < 0))
                    lo = mid;
                else
                    hi = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
    }
    return roots;
}

} // namespace oracles
