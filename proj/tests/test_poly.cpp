#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "rankcurve/poly.hpp"

using namespace rankcurve;

static const std::vector<std::string> XY = {"x1", "x2"};

TEST_CASE("parse expands the cubic square") {
    PolySystem s = parse_system("(x1^3 - x2)^2", XY);
    REQUIRE(s.polys.size() == 1);
    // x1^6 - 2 x1^3 x2 + x2^2
    Polynomial expect(2);
    expect.add_term(1.0, {6, 0});
    expect.add_term(-2.0, {3, 1});
    expect.add_term(1.0, {0, 2});
    expect.normalize();
    REQUIRE(s.polys[0] == expect);
}

TEST_CASE("parse collapses zero terms") {
    PolySystem s = parse_system("0*x1 + 1", XY);
    REQUIRE(s.polys[0].terms().size() == 1);
    REQUIRE(s.polys[0].terms()[0].coeff == 1.0);
    REQUIRE(s.polys[0].terms()[0].total_degree() == 0);
}

TEST_CASE("parse Choi-Lam") {
    PolySystem s = parse_system("x^2*y^2 + x^2*z^2 + y^2*z^2 - 4*x*y*z + 1", {"x", "y", "z"});
    REQUIRE(s.polys[0].terms().size() == 5);
    REQUIRE(s.polys[0].evaluate({1.0, 1.0, 1.0}) == 0.0);
}

TEST_CASE("parse errors carry position") {
    REQUIRE_THROWS_AS(parse_system("x1 + q", XY), ParseError);
    REQUIRE_THROWS_AS(parse_system("x1^x2", XY), ParseError);
    REQUIRE_THROWS_AS(parse_system("x1^2.5", XY), ParseError);
    REQUIRE_THROWS_AS(parse_system("x1 + ", XY), ParseError);
    REQUIRE_THROWS_AS(parse_system("(x1", XY), ParseError);
    REQUIRE_THROWS_AS(parse_system("x1 x2", XY), ParseError); // no implicit multiplication
    try {
        parse_system("x1 + 1\nx1 * zz", XY);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.line == 2);
        REQUIRE(e.column >= 6);
    }
}

TEST_CASE("evaluate examples") {
    PolySystem cl = parse_system("x^2*y^2 + x^2*z^2 + y^2*z^2 - 4*x*y*z + 1", {"x", "y", "z"});
    REQUIRE(cl.polys[0].evaluate({1, 1, 1}) == 0.0);

    Polynomial p = parse_polynomial("3*x1^2*x2 - 4*x1 + 7.25", XY);
    REQUIRE(p.evaluate({0.0, 0.0}) == 7.25);

    // direct evaluation of the paper's approximate witness point; the exact
    // value there is 7.42e-4 (the point is 4-digit rounded)
    Polynomial cub = parse_polynomial("(x1^3 - x2)^2", XY);
    double v = cub.evaluate({-0.8296, -0.5982});
    REQUIRE(std::fabs(v) <= 1e-3);
    REQUIRE(std::fabs(v) == Catch::Approx(7.4207e-4).epsilon(1e-3));
}

TEST_CASE("gradient examples and FD agreement") {
    Polynomial p = parse_polynomial("x1^2 + x2^2", XY);
    auto g = p.grad({3.0, 4.0});
    REQUIRE(g[0] == Catch::Approx(6.0));
    REQUIRE(g[1] == Catch::Approx(8.0));

    Polynomial q = parse_polynomial("(x1^3 - x2)^2", XY);
    auto g0 = q.grad({0.0, 0.0});
    REQUIRE(g0[0] == 0.0);
    REQUIRE(g0[1] == 0.0);
}

TEST_CASE("grad and hessian match central finite differences", "[property]") {
    Rng rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform(0.0, 3.999));
        Polynomial p = oracles::random_polynomial(rng, n, 6, 8);
        std::vector<double> x = oracles::random_point(rng, n);
        auto f = [&](const std::vector<double>& y) { return p.evaluate(y); };

        std::vector<double> g = p.grad(x);
        std::vector<double> gfd = oracles::fd_gradient(f, x, 1e-6);
        double scale = 1.0 + norm2(g);
        REQUIRE(dist2(g, gfd) <= 1e-5 * scale);

        std::vector<double> h = p.hessian(x);
        Mat hfd = oracles::fd_jacobian_of([&](const std::vector<double>& y) { return p.grad(y); },
                                          x, 1e-4);
        double err = 0.0, hs = 1.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                err = std::max(err, std::fabs(h[static_cast<size_t>(i) * n + j] - hfd(i, j)));
                hs = std::max(hs, std::fabs(h[static_cast<size_t>(i) * n + j]));
            }
        REQUIRE(err <= 1e-4 * hs);
    }
}

TEST_CASE("hessian is exactly symmetric and matches simple cases") {
    Polynomial p = parse_polynomial("x1*x2", XY);
    auto h = p.hessian({5.0, -3.0});
    REQUIRE(h[0] == 0.0);
    REQUIRE(h[1] == 1.0);
    REQUIRE(h[2] == 1.0);
    REQUIRE(h[3] == 0.0);

    Polynomial q = parse_polynomial("x1^2", XY);
    auto hq = q.hessian({7.0, 2.0});
    REQUIRE(hq[0] == 2.0);
    REQUIRE(hq[1] == 0.0);
    REQUIRE(hq[3] == 0.0);

    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Polynomial r = oracles::random_polynomial(rng, 4, 5, 10);
        auto hr = r.hessian(oracles::random_point(rng, 4));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                REQUIRE(hr[static_cast<size_t>(i) * 4 + j] == hr[static_cast<size_t>(j) * 4 + i]);
    }
}

TEST_CASE("jacobian stacks gradient rows") {
    PolySystem s = parse_system("x1\nx2", XY);
    auto J = s.jacobian({0.3, -0.7});
    REQUIRE(J == std::vector<double>{1, 0, 0, 1});

    PolySystem c = parse_system("(x1^3 - x2)^2", XY);
    auto Jc = c.jacobian({1.0, 1.0});
    REQUIRE(Jc[0] == 0.0);
    REQUIRE(Jc[1] == 0.0);
}

TEST_CASE("homogenize the positive quartic") {
    PolySystem s = parse_system("x^4 + y^4 - 3*x*y + 1.5", {"x", "y"});
    PolySystem h = homogenize(s);
    REQUIRE(h.n_vars == 3);
    REQUIRE(h.var_names.back() == "h");
    REQUIRE(h.polys.size() == 2);
    // x^4 + y^4 - 3 h^2 x y + 1.5 h^4
    Polynomial expect(3);
    expect.add_term(1.0, {4, 0, 0});
    expect.add_term(1.0, {0, 4, 0});
    expect.add_term(-3.0, {1, 1, 2});
    expect.add_term(1.5, {0, 0, 4});
    expect.normalize();
    REQUIRE(h.polys[0] == expect);
    // sphere equation
    Polynomial sphere(3);
    sphere.add_term(1.0, {2, 0, 0});
    sphere.add_term(1.0, {0, 2, 0});
    sphere.add_term(1.0, {0, 0, 2});
    sphere.add_term(-1.0, {0, 0, 0});
    sphere.normalize();
    REQUIRE(h.polys[1] == sphere);
}

TEST_CASE("homogenize linear and squared examples") {
    PolySystem lin = parse_system("x1", {"x1"});
    PolySystem h = homogenize(lin);
    REQUIRE(h.polys[0] == Polynomial::variable(2, 0));

    PolySystem s2 = parse_system("(x*y - 1)^2 + y^2", {"x", "y"});
    PolySystem h2 = homogenize(s2);
    Polynomial expect(3);
    expect.add_term(1.0, {0, 0, 4});
    expect.add_term(-2.0, {1, 1, 2});
    expect.add_term(1.0, {0, 2, 2});
    expect.add_term(1.0, {2, 2, 0});
    expect.normalize();
    REQUIRE(h2.polys[0] == expect);
}

TEST_CASE("homogenize properties: homogeneity and dehomogenization", "[property]") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform(0.0, 2.999));
        std::vector<std::string> names;
        for (int i = 0; i < n; ++i)
            names.push_back("x" + std::to_string(i + 1));
        PolySystem s;
        s.n_vars = n;
        s.var_names = names;
        s.polys.push_back(oracles::random_polynomial(rng, n, 5, 6));
        if (s.polys[0].is_zero())
            continue;
        PolySystem h = homogenize(s);
        // every non-sphere polynomial is homogeneous
        int d = h.polys[0].terms().empty() ? 0 : h.polys[0].terms()[0].total_degree();
        for (const auto& t : h.polys[0].terms())
            REQUIRE(t.total_degree() == d);
        // evaluating at h=1 recovers the original
        std::vector<double> x = oracles::random_point(rng, n);
        std::vector<double> xh = x;
        xh.push_back(1.0);
        REQUIRE(h.polys[0].evaluate(xh) ==
                Catch::Approx(s.polys[0].evaluate(x)).margin(1e-9).epsilon(1e-12));
    }
}

TEST_CASE("restrict_to_ray examples") {
    Polynomial p = parse_polynomial("x1^2", XY);
    auto c = p.restrict_to_ray({0.0, 0.0}, {1.0, 0.0});
    REQUIRE(c == std::vector<double>{0.0, 0.0, 1.0});

    Polynomial k = Polynomial::constant(2, 3.5);
    REQUIRE(k.restrict_to_ray({1.0, 2.0}, {0.5, 0.5}) == std::vector<double>{3.5});

    REQUIRE_THROWS_AS(p.restrict_to_ray({0.0, 0.0}, {0.0, 0.0}), Error);

    // (x1^3-x2)^2 at base (1,1): dir (1,3) is tangent there, so the symbolic
    // expansion ((1+t)^3-(1+3t))^2 = t^4 (3+t)^2 has trailing degree 4;
    // a generic direction gives 2
    Polynomial q = parse_polynomial("(x1^3 - x2)^2", XY);
    auto ct = q.restrict_to_ray({1.0, 1.0}, {1.0, 3.0});
    REQUIRE(ct.size() == 7);
    for (int i = 0; i < 4; ++i)
        REQUIRE(std::fabs(ct[i]) <= 1e-12);
    REQUIRE(ct[4] == Catch::Approx(9.0));
    REQUIRE(ct[5] == Catch::Approx(6.0));
    REQUIRE(ct[6] == Catch::Approx(1.0));
    auto cg = q.restrict_to_ray({1.0, 1.0}, {1.0, 2.0});
    REQUIRE(trailing_degree(cg, default_trailing_tol(cg)) == 2);
}

TEST_CASE("restrict_to_ray agrees with direct evaluation", "[property]") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform(0.0, 2.999));
        Polynomial p = oracles::random_polynomial(rng, n, 5, 6);
        std::vector<double> base = oracles::random_point(rng, n, -1.0, 1.0);
        std::vector<double> dir = rng.unit_vector(n);
        auto coeffs = p.restrict_to_ray(base, dir);
        for (double t : {-0.7, -0.2, 0.31, 1.1}) {
            double horner = 0.0;
            for (size_t i = coeffs.size(); i > 0; --i)
                horner = horner * t + coeffs[i - 1];
            std::vector<double> x(n);
            for (int i = 0; i < n; ++i)
                x[i] = base[i] + t * dir[i];
            REQUIRE(horner == Catch::Approx(p.evaluate(x)).margin(1e-8).epsilon(1e-9));
        }
    }
}

TEST_CASE("trailing_degree basics") {
    REQUIRE(trailing_degree({0.0, 0.0, 3.0, 1.0}, 0.0) == 2);
    REQUIRE_FALSE(trailing_degree({0.0, 0.0}, 0.0).has_value());
    REQUIRE_FALSE(trailing_degree({}, 0.0).has_value());
    REQUIRE(trailing_degree({1e-12, 5.0}, 1e-10) == 1);
}

TEST_CASE("parse-print round trip is a fixed point", "[property]") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform(0.0, 3.999));
        std::vector<std::string> names;
        for (int i = 0; i < n; ++i)
            names.push_back("x" + std::to_string(i + 1));
        Polynomial p = oracles::random_polynomial(rng, n, 6, 7);
        if (p.is_zero())
            continue;
        std::string printed = print_polynomial(p, names);
        Polynomial back = parse_polynomial(printed, names);
        REQUIRE(back == p);
        REQUIRE(print_polynomial(back, names) == printed);
    }
}

TEST_CASE("linearity of evaluation", "[property]") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2;
        Polynomial p = oracles::random_polynomial(rng, n, 5, 5);
        Polynomial q = oracles::random_polynomial(rng, n, 5, 5);
        std::vector<double> x = oracles::random_point(rng, n);
        double lhs = (p + q).evaluate(x);
        double rhs = p.evaluate(x) + q.evaluate(x);
        REQUIRE(lhs == Catch::Approx(rhs).margin(1e-8).epsilon(1e-10));
    }
}

TEST_CASE("system file text round trip") {
    PolySystem s = parse_system("(x1^3 - x2)^2\nx1 + 0.125*x2", XY);
    std::string printed = print_system(s);
    REQUIRE(printed.substr(0, 12) == "vars: x1 x2\n");
}
