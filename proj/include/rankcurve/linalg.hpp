#pragma once

// Dense kernels sized for curve-tracing ambient dimensions (n <= ~10):
// partial-pivot LU, cyclic Jacobi eigensolver, smallest-singular-value probe.

#include <algorithm>
#include <cmath>
#include <vector>

#include "rankcurve/errors.hpp"

namespace rankcurve {

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a; // row-major

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    Mat transposed() const {
        Mat m(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                m(j, i) = (*this)(i, j);
        return m;
    }

    double frobenius() const {
        double s = 0.0;
        for (double v : a)
            s += v * v;
        return std::sqrt(s);
    }

    std::vector<double> matvec(const std::vector<double>& x) const {
        std::vector<double> y(rows, 0.0);
        for (int i = 0; i < rows; ++i) {
            double s = 0.0;
            for (int j = 0; j < cols; ++j)
                s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }
};

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline std::vector<double> vsub(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size());
    for (size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] - b[i];
    return r;
}

inline std::vector<double> vadd(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size());
    for (size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] + b[i];
    return r;
}

// a + s*b
inline std::vector<double> vaxpy(const std::vector<double>& a, double s,
                                 const std::vector<double>& b) {
    std::vector<double> r(a.size());
    for (size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] + s * b[i];
    return r;
}

inline double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Solve A x = b by LU with partial pivoting. SingularMatrix when a pivot
// magnitude drops below 1e-14 * ||A||_F (relative, so beta-scaling of the
// system does not change the verdict).
inline std::vector<double> lu_solve(const Mat& A, const std::vector<double>& b) {
    if (A.rows != A.cols)
        throw DimensionMismatch("lu_solve: matrix not square");
    if (static_cast<int>(b.size()) != A.rows)
        throw DimensionMismatch("lu_solve: rhs length mismatch");
    const int n = A.rows;
    Mat lu = A;
    std::vector<double> x = b;
    const double pivot_floor = 1e-14 * A.frobenius();
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::fabs(lu(col, col));
        for (int r = col + 1; r < n; ++r) {
            double v = std::fabs(lu(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < pivot_floor || best == 0.0)
            throw SingularMatrix("lu_solve: pivot below threshold");
        if (piv != col) {
            for (int j = 0; j < n; ++j)
                std::swap(lu(piv, j), lu(col, j));
            std::swap(x[piv], x[col]);
        }
        double inv = 1.0 / lu(col, col);
        for (int r = col + 1; r < n; ++r) {
            double f = lu(r, col) * inv;
            if (f == 0.0)
                continue;
            lu(r, col) = f;
            for (int j = col + 1; j < n; ++j)
                lu(r, j) -= f * lu(col, j);
            x[r] -= f * x[col];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j)
            s -= lu(i, j) * x[j];
        x[i] = s / lu(i, i);
    }
    return x;
}

struct EigenDecomposition {
    std::vector<double> values; // ascending
    Mat vectors;                // column i pairs with values[i], orthonormal
};

// Cyclic Jacobi sweeps; fixed rotation order and a fixed sign convention
// (first nonzero component of each eigenvector positive) keep the output
// deterministic for a given input.
inline EigenDecomposition sym_eigen(const Mat& S) {
    if (S.rows != S.cols)
        throw DimensionMismatch("sym_eigen: matrix not square");
    const int n = S.rows;
    const double fnorm = S.frobenius();
    double asym = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            asym = std::max(asym, std::fabs(S(i, j) - S(j, i)));
    if (asym > 1e-8 * std::max(fnorm, 1e-300))
        throw NotSymmetric("sym_eigen: input not symmetric");

    Mat A = S;
    Mat V = Mat::identity(n);
    const double tol = 1e-12 * fnorm;
    bool converged = (n <= 1);
    for (int sweep = 0; sweep < 50 && !converged; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q)
                off += 2.0 * A(p, q) * A(p, q);
        if (std::sqrt(off) <= tol) {
            converged = true;
            break;
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = A(p, q);
                if (std::fabs(apq) <= 1e-300)
                    continue;
                double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                double tau = s / (1.0 + c);
                double app = A(p, p), aqq = A(q, q);
                A(p, p) = app - t * apq;
                A(q, q) = aqq + t * apq;
                A(p, q) = 0.0;
                A(q, p) = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        double arp = A(r, p), arq = A(r, q);
                        A(r, p) = arp - s * (arq + tau * arp);
                        A(p, r) = A(r, p);
                        A(r, q) = arq + s * (arp - tau * arq);
                        A(q, r) = A(r, q);
                    }
                    double vrp = V(r, p), vrq = V(r, q);
                    V(r, p) = vrp - s * (vrq + tau * vrp);
                    V(r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
    if (!converged) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q)
                off += 2.0 * A(p, q) * A(p, q);
        if (std::sqrt(off) > tol)
            throw NoConvergence("sym_eigen: Jacobi sweep cap reached");
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        if (A(i, i) != A(j, j))
            return A(i, i) < A(j, j);
        return i < j;
    });
    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Mat(n, n);
    for (int k = 0; k < n; ++k) {
        int src = order[k];
        out.values[k] = A(src, src);
        double sign = 1.0;
        for (int r = 0; r < n; ++r) {
            if (V(r, src) != 0.0) {
                sign = V(r, src) > 0 ? 1.0 : -1.0;
                break;
            }
        }
        for (int r = 0; r < n; ++r)
            out.vectors(r, k) = sign * V(r, src);
    }
    return out;
}

inline std::vector<double> eigen_column(const EigenDecomposition& e, int k) {
    std::vector<double> v(e.vectors.rows);
    for (int r = 0; r < e.vectors.rows; ++r)
        v[r] = e.vectors(r, k);
    return v;
}

// Smallest-singular-value estimate by inverse power iteration on A^T A.
// Diagnostics only; returns 0 when the solve fails outright.
inline double condition_probe(const Mat& A) {
    if (A.rows != A.cols)
        throw DimensionMismatch("condition_probe: matrix not square");
    const int n = A.rows;
    if (n == 0)
        return 0.0;
    Mat AtA(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int r = 0; r < n; ++r)
                s += A(r, i) * A(r, j);
            AtA(i, j) = s;
        }
    // small shift keeps the solves above the LU pivot floor even when
    // lambda_min(AtA) sits below it; the Rayleigh quotient uses the
    // unshifted matrix
    Mat shifted = AtA;
    double shift = 1e-13 * AtA.frobenius();
    for (int i = 0; i < n; ++i)
        shifted(i, i) += shift;
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double lambda = 0.0;
    try {
        for (int it = 0; it < 25; ++it) {
            std::vector<double> y = lu_solve(shifted, x);
            double ny = norm2(y);
            if (!(ny > 0.0) || !std::isfinite(ny))
                return 0.0;
            for (auto& v : y)
                v /= ny;
            x = y;
            std::vector<double> Ax = AtA.matvec(x);
            lambda = dot(x, Ax);
        }
    } catch (const SingularMatrix&) {
        return 0.0;
    }
    return lambda > 0.0 ? std::sqrt(lambda) : 0.0;
}

} // namespace rankcurve
