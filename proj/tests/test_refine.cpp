#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "rankcurve/refine.hpp"

using namespace rankcurve;

static PolySystem cubic() { return parse_system("(x1^3 - x2)^2", {"x1", "x2"}); }

// normalized distance to the curve x2 = x1^3
static double cubic_distance(const std::vector<double>& x) {
    return std::fabs(x[0] * x[0] * x[0] - x[1]) / std::hypot(3.0 * x[0] * x[0], 1.0);
}

TEST_CASE("track_beta degenerate and error cases") {
    PolySystem c = cubic();
    PenaltyProblem prob(c, {0.0, -1.0}, 1e4);
    CriticalPoint w = newton_refine(prob, {-0.83, -0.60}, prob.default_tol());

    HomotopyPath p = track_beta(c, prob.anchor, w.x, 1e-4, 1e-4);
    REQUIRE(p.status == PathStatus::Completed);
    REQUIRE(p.samples.size() == 1);

    REQUIRE_THROWS_AS(track_beta(c, prob.anchor, {0.5, 0.5}, 1e-4, 1e-8), InvalidStart);
}

TEST_CASE("track_beta refines the cubic witness by a decade factor") {
    PolySystem c = cubic();
    std::vector<double> anchor = {0.0, -1.0};
    PenaltyProblem prob(c, anchor, 1e4);
    CriticalPoint w = newton_refine(prob, {-0.83, -0.60}, prob.default_tol());
    double d0 = cubic_distance(w.x);

    HomotopyPath p = track_beta(c, anchor, w.x, 1e-4, 1e-8);
    REQUIRE(p.status == PathStatus::Completed);
    double d1 = cubic_distance(p.end());
    REQUIRE(d1 <= 1e-3);
    REQUIRE(d0 / d1 >= 10.0);
    // t strictly monotone, every sample on the homotopy within tolerance
    for (size_t i = 1; i < p.samples.size(); ++i)
        REQUIRE(p.samples[i].first < p.samples[i - 1].first);
    for (const auto& [t, x] : p.samples) {
        std::vector<double> h(2);
        for (int i = 0; i < 2; ++i)
            h[i] = t * (x[i] - anchor[i]);
        auto J = c.jacobian(x);
        double f = c.polys[0].evaluate(x);
        for (int i = 0; i < 2; ++i)
            h[i] += J[i] * f;
        REQUIRE(norm2(h) <= 1e-9 * (1.0 + norm2(anchor)));
    }
}

TEST_CASE("track_beta closed form for the full-rank line") {
    // f = {x1}, anchor (2): critical point x = 2t/(t+1)
    PolySystem s = parse_system("x1", {"x1"});
    std::vector<double> anchor = {2.0};
    double t1 = 1e-2, t0 = 1e-6;
    std::vector<double> x0 = {2.0 * t1 / (t1 + 1.0)};
    HomotopyPath p = track_beta(s, anchor, x0, t1, t0);
    REQUIRE(p.status == PathStatus::Completed);
    REQUIRE(std::fabs(p.end()[0] - 2.0 * t0 / (t0 + 1.0)) <= 1e-9);
}

TEST_CASE("move_toward_tube identities") {
    PolySystem c = cubic();
    std::vector<double> a0 = {0.0, -1.0};
    PenaltyProblem prob(c, a0, 1e4);
    CriticalPoint w = newton_refine(prob, {-0.83, -0.60}, prob.default_tol());

    TubeMove mv = move_toward_tube(c, w.x, a0, 0.1, 1e4);
    // a1 exactly on the segment [x0, a0] at parameter lambda
    for (int i = 0; i < 2; ++i)
        REQUIRE(mv.a1[i] == 0.9 * w.x[i] + 0.1 * a0[i]);
    REQUIRE(dist2(mv.a1, w.x) == Catch::Approx(0.1 * dist2(a0, w.x)).epsilon(1e-12));
    // x1 closer to the curve than x0
    REQUIRE(cubic_distance(mv.x1) < cubic_distance(w.x));
    // G(x1) = 0 at (a1, beta) within Newton tolerance
    PenaltyProblem p1(c, mv.a1, 1e4);
    REQUIRE(norm2(grad_system(p1, mv.x1)) <= 1e-8 * (1.0 + norm2(mv.a1)));
}

TEST_CASE("move_toward_tube lambda near 1 is a no-op") {
    PolySystem c = cubic();
    std::vector<double> a0 = {0.0, -1.0};
    PenaltyProblem prob(c, a0, 1e4);
    CriticalPoint w = newton_refine(prob, {-0.83, -0.60}, prob.default_tol());
    TubeMove mv = move_toward_tube(c, w.x, a0, 1.0 - 1e-9, 1e4);
    REQUIRE(dist2(mv.a1, a0) <= 1e-8);
    REQUIRE(dist2(mv.x1, w.x) <= 1e-7);
    REQUIRE_THROWS_AS(move_toward_tube(c, w.x, a0, 1.5, 1e4), Error);
}

TEST_CASE("backward error decreases along the beta ladder", "[property]") {
    PolySystem c = cubic();
    std::vector<double> anchor = {0.0, -1.0};
    PenaltyProblem prob(c, anchor, 1e4);
    for (auto start : {std::vector<double>{-0.83, -0.60}, {0.0, -0.04}, {-0.36, -0.08}}) {
        CriticalPoint w = newton_refine(prob, start, prob.default_tol());
        double prev = 1e300;
        std::vector<double> x = w.x;
        double tprev = 1e-4;
        for (double beta : {1e4, 1e5, 1e6, 1e7, 1e8}) {
            if (beta > 1e4) {
                HomotopyPath p = track_beta(c, anchor, x, tprev, 1.0 / beta);
                REQUIRE(p.status == PathStatus::Completed);
                x = p.end();
                tprev = 1.0 / beta;
            }
            double f = c.polys[0].evaluate(x);
            double sumz2 = f * f;
            REQUIRE(sumz2 < prev);
            prev = sumz2;
        }
    }
}

TEST_CASE("convergence slope: rank-deficient cubic near -1/3") {
    PolySystem c = cubic();
    PenaltyProblem prob(c, {0.0, -1.0}, 1e4);
    CriticalPoint w = newton_refine(prob, {-0.83, -0.60}, prob.default_tol());
    double slope = convergence_slope(c, prob.anchor, w.x, {1e4, 1e6, 1e8}, cubic_distance);
    REQUIRE(slope >= -0.43);
    REQUIRE(slope <= -0.23);
}

TEST_CASE("convergence slope: full-rank control near -1") {
    PolySystem s = parse_system("x1", {"x1"});
    std::vector<double> anchor = {2.0};
    std::vector<double> seed = {2.0 / (1.0 + 1e2)};
    double slope = convergence_slope(s, anchor, seed, {1e2, 1e4, 1e6},
                                     [](const std::vector<double>& x) { return std::fabs(x[0]); });
    REQUIRE(slope == Catch::Approx(-1.0).margin(0.1));
}

TEST_CASE("convergence slope: exact seed reports NaN sentinel") {
    // f = {x1^2}: anchor on the zero set makes every critical point exact
    PolySystem s = parse_system("x1^2", {"x1"});
    std::vector<double> anchor = {0.0};
    double slope = convergence_slope(s, anchor, {0.0}, {1e2, 1e4, 1e6},
                                     [](const std::vector<double>& x) { return std::fabs(x[0]); });
    REQUIRE(std::isnan(slope));
    REQUIRE_THROWS_AS(convergence_slope(s, anchor, {0.0}, {1e2, 1e4},
                                        [](const std::vector<double>&) { return 1.0; }),
                      Error);
}
