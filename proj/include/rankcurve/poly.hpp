#pragma once

// Sparse multivariate polynomials over double: parsing, printing,
// evaluation, differentiation, homogenization, ray restriction.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rankcurve/errors.hpp"

namespace rankcurve {

struct Monomial {
    double coeff = 0.0;
    std::vector<int> exps; // one entry per variable, all >= 0

    int total_degree() const {
        int d = 0;
        for (int e : exps)
            d += e;
        return d;
    }
};

// total degree descending, then lexicographic descending on exponents
inline bool term_order_before(const Monomial& a, const Monomial& b) {
    int da = a.total_degree(), db = b.total_degree();
    if (da != db)
        return da > db;
    return a.exps > b.exps;
}

class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(int n_vars) : n_vars_(n_vars) {}
    Polynomial(int n_vars, std::vector<Monomial> terms) : n_vars_(n_vars) {
        for (auto& t : terms)
            add_term(t.coeff, t.exps);
        normalize();
    }

    static Polynomial constant(int n_vars, double c) {
        Polynomial p(n_vars);
        p.add_term(c, std::vector<int>(n_vars, 0));
        p.normalize();
        return p;
    }

    static Polynomial variable(int n_vars, int idx, double c = 1.0) {
        Polynomial p(n_vars);
        std::vector<int> e(n_vars, 0);
        e[idx] = 1;
        p.add_term(c, e);
        p.normalize();
        return p;
    }

    int n_vars() const { return n_vars_; }
    const std::vector<Monomial>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int total_degree() const {
        int d = 0;
        for (const auto& t : terms_)
            d = std::max(d, t.total_degree());
        return d;
    }

    bool operator==(const Polynomial& o) const {
        if (n_vars_ != o.n_vars_ || terms_.size() != o.terms_.size())
            return false;
        for (size_t i = 0; i < terms_.size(); ++i)
            if (terms_[i].coeff != o.terms_[i].coeff || terms_[i].exps != o.terms_[i].exps)
                return false;
        return true;
    }

    Polynomial operator+(const Polynomial& o) const {
        check_same(o);
        Polynomial r(n_vars_);
        r.terms_ = terms_;
        for (const auto& t : o.terms_)
            r.add_term(t.coeff, t.exps);
        r.normalize();
        return r;
    }

    Polynomial operator-(const Polynomial& o) const {
        check_same(o);
        Polynomial r(n_vars_);
        r.terms_ = terms_;
        for (const auto& t : o.terms_)
            r.add_term(-t.coeff, t.exps);
        r.normalize();
        return r;
    }

    Polynomial operator*(const Polynomial& o) const {
        check_same(o);
        Polynomial r(n_vars_);
        for (const auto& a : terms_)
            for (const auto& b : o.terms_) {
                std::vector<int> e(n_vars_);
                for (int i = 0; i < n_vars_; ++i)
                    e[i] = a.exps[i] + b.exps[i];
                r.add_term(a.coeff * b.coeff, std::move(e));
            }
        r.normalize();
        return r;
    }

    Polynomial scaled(double c) const {
        Polynomial r(n_vars_);
        if (c != 0.0)
            for (const auto& t : terms_)
                r.add_term(c * t.coeff, t.exps);
        r.normalize();
        return r;
    }

    Polynomial pow(int e) const {
        if (e < 0)
            throw Error("negative exponent");
        Polynomial r = constant(n_vars_, 1.0);
        Polynomial base = *this;
        while (e > 0) {
            if (e & 1)
                r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }

    Polynomial derivative(int var) const {
        Polynomial r(n_vars_);
        for (const auto& t : terms_) {
            if (t.exps[var] == 0)
                continue;
            std::vector<int> e = t.exps;
            double c = t.coeff * e[var];
            e[var] -= 1;
            r.add_term(c, std::move(e));
        }
        r.normalize();
        return r;
    }

    double evaluate(const std::vector<double>& x) const {
        check_point(x);
        double s = 0.0;
        for (const auto& t : terms_) {
            double m = t.coeff;
            for (int i = 0; i < n_vars_; ++i)
                m *= ipow(x[i], t.exps[i]);
            s += m;
        }
        return s;
    }

    // evaluation with |coeff| at |x|: running magnitude for error floors
    double evaluate_abs(const std::vector<double>& x) const {
        check_point(x);
        double s = 0.0;
        for (const auto& t : terms_) {
            double m = std::fabs(t.coeff);
            for (int i = 0; i < n_vars_; ++i)
                m *= ipow(std::fabs(x[i]), t.exps[i]);
            s += m;
        }
        return s;
    }

    void grad(const std::vector<double>& x, std::vector<double>& out) const {
        check_point(x);
        out.assign(n_vars_, 0.0);
        for (const auto& t : terms_) {
            for (int v = 0; v < n_vars_; ++v) {
                if (t.exps[v] == 0)
                    continue;
                double m = t.coeff * t.exps[v] * ipow(x[v], t.exps[v] - 1);
                for (int i = 0; i < n_vars_; ++i)
                    if (i != v)
                        m *= ipow(x[i], t.exps[i]);
                out[v] += m;
            }
        }
    }

    std::vector<double> grad(const std::vector<double>& x) const {
        std::vector<double> g;
        grad(x, g);
        return g;
    }

    // dense row-major n x n, exactly symmetric (upper triangle mirrored)
    std::vector<double> hessian(const std::vector<double>& x) const {
        check_point(x);
        const int n = n_vars_;
        std::vector<double> h(static_cast<size_t>(n) * n, 0.0);
        for (const auto& t : terms_) {
            for (int a = 0; a < n; ++a) {
                if (t.exps[a] == 0)
                    continue;
                for (int b = a; b < n; ++b) {
                    double m;
                    if (a == b) {
                        if (t.exps[a] < 2)
                            continue;
                        m = t.coeff * t.exps[a] * (t.exps[a] - 1) * ipow(x[a], t.exps[a] - 2);
                        for (int i = 0; i < n; ++i)
                            if (i != a)
                                m *= ipow(x[i], t.exps[i]);
                    } else {
                        if (t.exps[b] == 0)
                            continue;
                        m = t.coeff * t.exps[a] * t.exps[b] * ipow(x[a], t.exps[a] - 1) *
                            ipow(x[b], t.exps[b] - 1);
                        for (int i = 0; i < n; ++i)
                            if (i != a && i != b)
                                m *= ipow(x[i], t.exps[i]);
                    }
                    h[static_cast<size_t>(a) * n + b] += m;
                }
            }
        }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < a; ++b)
                h[static_cast<size_t>(a) * n + b] = h[static_cast<size_t>(b) * n + a];
        return h;
    }

    // coefficients of t -> p(base + t*dir), ascending powers of t
    std::vector<double> restrict_to_ray(const std::vector<double>& base,
                                        const std::vector<double>& dir) const {
        check_point(base);
        check_point(dir);
        double dn = 0.0;
        for (double d : dir)
            dn += d * d;
        if (dn == 0.0)
            throw Error("restrict_to_ray: zero direction");
        std::vector<double> out(static_cast<size_t>(total_degree()) + 1, 0.0);
        std::vector<double> acc, next;
        for (const auto& t : terms_) {
            acc.assign(1, t.coeff);
            for (int i = 0; i < n_vars_; ++i) {
                for (int e = 0; e < t.exps[i]; ++e) {
                    next.assign(acc.size() + 1, 0.0);
                    for (size_t j = 0; j < acc.size(); ++j) {
                        next[j] += acc[j] * base[i];
                        next[j + 1] += acc[j] * dir[i];
                    }
                    acc.swap(next);
                }
            }
            for (size_t j = 0; j < acc.size(); ++j)
                out[j] += acc[j];
        }
        return out;
    }

    void add_term(double c, std::vector<int> e) {
        Monomial m;
        m.coeff = c;
        m.exps = std::move(e);
        terms_.push_back(std::move(m));
    }

    // merge duplicate exponent tuples, drop zeros, sort canonically
    void normalize() {
        std::sort(terms_.begin(), terms_.end(), term_order_before);
        std::vector<Monomial> merged;
        for (auto& t : terms_) {
            if (!merged.empty() && merged.back().exps == t.exps)
                merged.back().coeff += t.coeff;
            else
                merged.push_back(std::move(t));
        }
        terms_.clear();
        for (auto& t : merged)
            if (t.coeff != 0.0 && std::isfinite(t.coeff))
                terms_.push_back(std::move(t));
    }

  private:
    static double ipow(double x, int e) {
        double r = 1.0;
        while (e > 0) {
            if (e & 1)
                r *= x;
            x *= x;
            e >>= 1;
        }
        return r;
    }

    void check_same(const Polynomial& o) const {
        if (n_vars_ != o.n_vars_)
            throw DimensionMismatch("polynomial variable counts differ");
    }
    void check_point(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != n_vars_)
            throw DimensionMismatch("point length does not match variable count");
    }

    int n_vars_ = 0;
    std::vector<Monomial> terms_;
};

// shortest decimal that parses back to the same double
inline std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v)
            break;
    }
    return buf;
}

struct PolySystem {
    std::vector<Polynomial> polys;
    int n_vars = 0;
    std::vector<std::string> var_names;

    int k() const { return static_cast<int>(polys.size()); }

    std::vector<double> evaluate(const std::vector<double>& x) const {
        std::vector<double> f(polys.size());
        for (size_t i = 0; i < polys.size(); ++i)
            f[i] = polys[i].evaluate(x);
        return f;
    }

    double residual(const std::vector<double>& x) const {
        double s = 0.0;
        for (const auto& p : polys) {
            double v = p.evaluate(x);
            s += v * v;
        }
        return std::sqrt(s);
    }

    // row-major k x n
    std::vector<double> jacobian(const std::vector<double>& x) const {
        std::vector<double> J(polys.size() * static_cast<size_t>(n_vars));
        std::vector<double> g;
        for (size_t i = 0; i < polys.size(); ++i) {
            polys[i].grad(x, g);
            std::copy(g.begin(), g.end(), J.begin() + i * static_cast<size_t>(n_vars));
        }
        return J;
    }
};

inline std::string print_polynomial(const Polynomial& p, const std::vector<std::string>& names) {
    if (p.is_zero())
        return "0";
    std::string out;
    bool first = true;
    for (const auto& t : p.terms()) {
        double c = t.coeff;
        if (first) {
            if (c < 0) {
                out += "-";
                c = -c;
            }
        } else {
            out += (c < 0) ? " - " : " + ";
            c = std::fabs(c);
        }
        bool any_var = t.total_degree() > 0;
        bool wrote = false;
        if (c != 1.0 || !any_var) {
            out += format_double(c);
            wrote = true;
        }
        for (size_t i = 0; i < t.exps.size(); ++i) {
            if (t.exps[i] == 0)
                continue;
            if (wrote)
                out += "*";
            out += names[i];
            if (t.exps[i] > 1) {
                out += "^";
                out += std::to_string(t.exps[i]);
            }
            wrote = true;
        }
        first = false;
    }
    return out;
}

inline std::string print_system(const PolySystem& sys) {
    std::string out = "vars:";
    for (const auto& n : sys.var_names)
        out += " " + n;
    out += "\n";
    for (const auto& p : sys.polys)
        out += print_polynomial(p, sys.var_names) + "\n";
    return out;
}

namespace detail {

struct Lexer {
    const std::string& src;
    int line;
    size_t pos = 0;

    Lexer(const std::string& s, int line_no) : src(s), line(line_no) {}

    void skip_ws() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\r'))
            ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= src.size();
    }
    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }
    int col() const { return static_cast<int>(pos) + 1; }
    char take() {
        skip_ws();
        return src[pos++];
    }
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line, col()); }
};

class PolyParser {
  public:
    PolyParser(Lexer& lx, const std::vector<std::string>& names) : lx_(lx), names_(names) {}

    Polynomial parse() {
        Polynomial p = expression();
        if (!lx_.eof())
            lx_.fail("unexpected trailing input");
        return p;
    }

  private:
    Polynomial expression() {
        double sign = 1.0;
        if (lx_.peek() == '+' || lx_.peek() == '-')
            sign = (lx_.take() == '-') ? -1.0 : 1.0;
        Polynomial acc = term().scaled(sign);
        while (lx_.peek() == '+' || lx_.peek() == '-') {
            char op = lx_.take();
            Polynomial t = term();
            acc = (op == '+') ? acc + t : acc - t;
        }
        return acc;
    }

    Polynomial term() {
        Polynomial acc = factor();
        while (lx_.peek() == '*') {
            lx_.take();
            acc = acc * factor();
        }
        return acc;
    }

    Polynomial factor() {
        Polynomial base = primary();
        if (lx_.peek() == '^') {
            lx_.take();
            return base.pow(exponent());
        }
        return base;
    }

    Polynomial primary() {
        char c = lx_.peek();
        if (c == '(') {
            lx_.take();
            Polynomial p = expression();
            if (lx_.peek() != ')')
                lx_.fail("expected ')'");
            lx_.take();
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return Polynomial::constant(static_cast<int>(names_.size()), number());
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            int col = lx_.col();
            std::string id = identifier();
            for (size_t i = 0; i < names_.size(); ++i)
                if (names_[i] == id)
                    return Polynomial::variable(static_cast<int>(names_.size()),
                                                static_cast<int>(i));
            throw ParseError("unknown identifier '" + id + "'", lx_.line, col);
        }
        if (c == '\0')
            lx_.fail("unexpected end of input");
        lx_.fail(std::string("unexpected character '") + c + "'");
    }

    std::string identifier() {
        lx_.skip_ws();
        std::string id;
        while (lx_.pos < lx_.src.size()) {
            char c = lx_.src[lx_.pos];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                id += c;
                ++lx_.pos;
            } else
                break;
        }
        return id;
    }

    double number() {
        lx_.skip_ws();
        size_t start = lx_.pos;
        while (lx_.pos < lx_.src.size() &&
               std::isdigit(static_cast<unsigned char>(lx_.src[lx_.pos])))
            ++lx_.pos;
        if (lx_.pos < lx_.src.size() && lx_.src[lx_.pos] == '.') {
            ++lx_.pos;
            while (lx_.pos < lx_.src.size() &&
                   std::isdigit(static_cast<unsigned char>(lx_.src[lx_.pos])))
                ++lx_.pos;
        }
        if (lx_.pos < lx_.src.size() && (lx_.src[lx_.pos] == 'e' || lx_.src[lx_.pos] == 'E')) {
            size_t mark = lx_.pos;
            ++lx_.pos;
            if (lx_.pos < lx_.src.size() && (lx_.src[lx_.pos] == '+' || lx_.src[lx_.pos] == '-'))
                ++lx_.pos;
            if (lx_.pos < lx_.src.size() &&
                std::isdigit(static_cast<unsigned char>(lx_.src[lx_.pos]))) {
                while (lx_.pos < lx_.src.size() &&
                       std::isdigit(static_cast<unsigned char>(lx_.src[lx_.pos])))
                    ++lx_.pos;
            } else {
                lx_.pos = mark; // 'e' was an identifier start, not an exponent
            }
        }
        return std::strtod(lx_.src.substr(start, lx_.pos - start).c_str(), nullptr);
    }

    int exponent() {
        lx_.skip_ws();
        int col = lx_.col();
        if (lx_.pos >= lx_.src.size() ||
            !std::isdigit(static_cast<unsigned char>(lx_.src[lx_.pos])))
            throw ParseError("exponent must be a nonnegative integer literal", lx_.line, col);
        long v = 0;
        while (lx_.pos < lx_.src.size() &&
               std::isdigit(static_cast<unsigned char>(lx_.src[lx_.pos]))) {
            v = v * 10 + (lx_.src[lx_.pos] - '0');
            if (v > 1000000)
                throw ParseError("exponent too large", lx_.line, col);
            ++lx_.pos;
        }
        if (lx_.pos < lx_.src.size() && lx_.src[lx_.pos] == '.')
            throw ParseError("exponent must be a nonnegative integer literal", lx_.line, col);
        return static_cast<int>(v);
    }

    Lexer& lx_;
    const std::vector<std::string>& names_;
};

inline std::string strip_comment(const std::string& line) {
    auto h = line.find('#');
    return h == std::string::npos ? line : line.substr(0, h);
}

inline bool blank(const std::string& s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c)))
            return false;
    return true;
}

} // namespace detail

inline Polynomial parse_polynomial(const std::string& text,
                                   const std::vector<std::string>& var_names, int line_no = 1) {
    detail::Lexer lx(text, line_no);
    return detail::PolyParser(lx, var_names).parse();
}

// one polynomial per nonempty line; '#' starts a comment
inline PolySystem parse_system(const std::string& text,
                               const std::vector<std::string>& var_names) {
    PolySystem sys;
    sys.n_vars = static_cast<int>(var_names.size());
    sys.var_names = var_names;
    int line_no = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        std::string line = text.substr(start, end == std::string::npos ? end : end - start);
        ++line_no;
        start = (end == std::string::npos) ? text.size() + 1 : end + 1;
        line = detail::strip_comment(line);
        if (detail::blank(line))
            continue;
        sys.polys.push_back(parse_polynomial(line, var_names, line_no));
    }
    if (sys.polys.empty())
        throw Error("system has no polynomials");
    return sys;
}

// degree-homogenize each polynomial with a fresh last variable, then append
// the unit sphere equation  h^2 + sum x_i^2 - 1
inline PolySystem homogenize(const PolySystem& sys) {
    PolySystem out;
    out.n_vars = sys.n_vars + 1;
    out.var_names = sys.var_names;
    std::string hname = "h";
    for (int suffix = 0; true; ++suffix) {
        bool taken = false;
        for (const auto& n : out.var_names)
            if (n == hname)
                taken = true;
        if (!taken)
            break;
        hname = "h" + std::to_string(suffix);
    }
    out.var_names.push_back(hname);
    for (const auto& p : sys.polys) {
        int d = p.total_degree();
        Polynomial q(out.n_vars);
        for (const auto& t : p.terms()) {
            std::vector<int> e = t.exps;
            e.push_back(d - t.total_degree());
            q.add_term(t.coeff, std::move(e));
        }
        q.normalize();
        out.polys.push_back(std::move(q));
    }
    Polynomial sphere(out.n_vars);
    for (int i = 0; i < out.n_vars; ++i) {
        std::vector<int> e(out.n_vars, 0);
        e[i] = 2;
        sphere.add_term(1.0, std::move(e));
    }
    sphere.add_term(-1.0, std::vector<int>(out.n_vars, 0));
    sphere.normalize();
    out.polys.push_back(std::move(sphere));
    return out;
}

// index of the lowest-order coefficient with |c| > tol; nullopt = zero polynomial
inline std::optional<int> trailing_degree(const std::vector<double>& coeffs, double tol) {
    for (size_t i = 0; i < coeffs.size(); ++i)
        if (std::fabs(coeffs[i]) > tol)
            return static_cast<int>(i);
    return std::nullopt;
}

inline double default_trailing_tol(const std::vector<double>& coeffs) {
    double m = 0.0;
    for (double c : coeffs)
        m = std::max(m, std::fabs(c));
    return 1e-10 * m;
}

} // namespace rankcurve
