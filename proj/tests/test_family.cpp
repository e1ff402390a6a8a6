#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sponge/dimension.hpp"
#include "sponge/error.hpp"
#include "sponge/family.hpp"
#include "sponge/hypothesis.hpp"
#include "support.hpp"

using namespace sponge;
using sponge::testing::load_spec;
using sponge::testing::make_spec;

namespace {

// Fiber sums that nearly coincide at the upper root t = 1.
SpongeSpec near_degenerate() { return make_spec({0.9}, {{0.5, 0.5}}, {{{0.5, 0.5}, {0.5, 0.495}}}); }

// Two fibers in one column with roots log(phi)/log 2 and 1.
SpongeSpec two_fibers() { return make_spec({0.9}, {{0.5, 0.5}}, {{{0.5, 0.25}, {0.5, 0.5}}}); }

double midpoint(const FiberRoots& r) { return 0.5 * (r.t_lower + r.t_upper); }

}  // namespace

TEST_CASE("fiber roots") {
    const auto s = make_spec({0.9}, {{0.5, 0.25, 0.15}}, {{{0.5, 0.5}, {0.25}, {0.5 * 0.3, 0.25 * 0.3}}});
    const auto r = fiber_roots(s);
    CHECK(r.t_ij[0] == 1.0);
    CHECK(r.t_ij[1] == 0.0);
    const auto s2 = two_fibers();
    const auto r2 = fiber_roots(s2);
    CHECK(r2.t_ij[0] == doctest::Approx(std::log((1 + std::sqrt(5.0)) / 2) / std::log(2.0)).epsilon(1e-14));
    CHECK(r2.t_lower == r2.t_ij[0]);
    CHECK(r2.t_upper == 1.0);
    CHECK_FALSE(r2.degenerate());
}

TEST_CASE("fiber roots plug back and bracket A_t, B_t") {
    Rng rng(41);
    for (int n = 0; n < 100; ++n) {
        const auto s = sponge::testing::random_spec(rng);
        const auto r = fiber_roots(s);
        for (std::size_t f = 0; f < s.num_fibers(); ++f) {
            if (r.t_ij[f] > 0.0 && r.t_ij[f] < 1.0) CHECK(std::abs(fiber_sum(s, f, r.t_ij[f]) - 1.0) <= 1e-12);
        }
        CHECK(r.t_lower <= r.t_upper);
        if (r.degenerate()) continue;
        for (int q = 1; q < 10; ++q) {
            const double t = r.t_lower + q * (r.t_upper - r.t_lower) / 10;
            CHECK(r.A(t) > 1.0);
            CHECK(r.B(t) < 1.0);
        }
    }
}

TEST_CASE("solve_alpha on two fibers") {
    const auto s = two_fibers();
    const double t = midpoint(fiber_roots(s));
    CHECK(family_F(s, -50, 0, 0, t, 1.0) < 0.0);
    CHECK(family_F(s, 50, 0, 0, t, 1.0) > 0.0);
    const double alpha = solve_alpha(s, 0.0, 0.0, t, 1.0, 1e-12);
    CHECK(std::abs(family_F(s, alpha, 0, 0, t, 1.0)) <= 1e-12);
}

TEST_CASE("solve_alpha fails to bracket when every fiber sum coincides") {
    const auto cube = sponge::testing::uniform_spec(0.5, 2, 2, 2);
    CHECK_THROWS_AS(solve_alpha(cube, 0.0, 0.0, 0.5, 1.0), BracketNotFound);
}

TEST_CASE("solve_alpha preconditions") {
    const auto s = two_fibers();
    CHECK_THROWS_AS(solve_alpha(s, 0, 0, 0.5, 1.0), PreconditionError);  // below t_lower
    CHECK_THROWS_AS(solve_alpha(s, 0, 0, 0.8, 0.0), PreconditionError);
    CHECK_THROWS_AS(solve_alpha(s, 0, 0, 0.8, 1.5), PreconditionError);
}

TEST_CASE("alpha grows logarithmically as t approaches t_upper") {
    for (const auto& s : {load_spec("equal_heights"), near_degenerate()}) {
        const auto r = fiber_roots(s);
        std::vector<double> alpha;
        for (double eps : {1e-3, 1e-4, 1e-5, 1e-6}) alpha.push_back(solve_lambda2(s, r.t_upper - eps, 1.0).alpha);
        for (std::size_t q = 1; q < alpha.size(); ++q) CHECK(alpha[q] > alpha[q - 1]);
        // Equal increments per decade of t_upper - t.
        const double d1 = alpha[2] - alpha[1], d2 = alpha[3] - alpha[2];
        CHECK(d2 == doctest::Approx(d1).epsilon(0.1));
    }
    // Near-coincident sums at t_upper make the rate steep enough to pass 10^3.
    const auto s = near_degenerate();
    CHECK(solve_lambda2(s, fiber_roots(s).t_upper - 1e-6, 1.0).alpha > 1e3);
}

TEST_CASE("solve_lambda1 normalizes") {
    const auto s = load_spec("matched_heights");
    const double t = midpoint(fiber_roots(s));
    for (double rho : {0.25, 1.0}) {
        const auto l1 = solve_lambda1(s, 0.7, t, rho);
        CHECK(std::abs(l1.log_C) <= 1e-10);
        const auto pt = family_point(s, l1.alpha, l1.lambda1, 0.7, t, rho);
        double total = 0.0;
        for (double v : pt.p) total += v;
        CHECK(std::abs(total - 1.0) <= 1e-12);
        CHECK(std::abs(pt.F) <= 1e-12);
    }
}

TEST_CASE("solve_lambda1 closed form with one column") {
    const auto s = load_spec("single_column");
    const double t = midpoint(fiber_roots(s)), rho = 0.5, lambda2 = 0.3;
    const auto l1 = solve_lambda1(s, lambda2, t, rho);
    const auto pt = family_point(s, l1.alpha, l1.lambda1, lambda2, t, rho);
    // 0.7^lambda1 gamma^rho = 1.
    CHECK(l1.lambda1 == doctest::Approx(rho * pt.log_gamma[0] / std::log(1.0 / 0.7)).epsilon(1e-10));
}

TEST_CASE("with one column, rescaling c moves lambda1 but not p") {
    const auto s = load_spec("single_column");
    auto lv = s.levels();
    lv.c = {0.9};
    const auto s2 = SpongeSpec::create(lv);
    const double t = midpoint(fiber_roots(s));
    const auto a = solve_lambda1(s, 0.3, t, 1.0), b = solve_lambda1(s2, 0.3, t, 1.0);
    CHECK(a.lambda1 != doctest::Approx(b.lambda1));
    const auto pa = family_point(s, a.alpha, a.lambda1, 0.3, t, 1.0);
    const auto pb = family_point(s2, b.alpha, b.lambda1, 0.3, t, 1.0);
    for (std::size_t f = 0; f < pa.p.size(); ++f) CHECK(pa.p[f] == doctest::Approx(pb.p[f]).epsilon(1e-10));
}

TEST_CASE("solve_lambda2 residuals and invariants") {
    for (const char* name : {"equal_heights", "single_column", "matched_heights", "skewed", "dominant_c"}) {
        const auto s = load_spec(name);
        const auto r = fiber_roots(s);
        REQUIRE(check_generic_hypothesis(s, 101, r.t_lower, r.t_upper).holds);
        for (double rho : {0.25, 0.5, 0.75, 1.0}) {
            for (int q = 1; q <= 5; ++q) {
                const double t = r.t_lower + q * (r.t_upper - r.t_lower) / 6;
                const auto sol = solve_lambda2(s, t, rho);
                CHECK(std::abs(sol.residuals.normalization) <= 1e-12);
                CHECK(std::abs(sol.residuals.log_C) <= 1e-10);
                CHECK(std::abs(sol.residuals.gamma_equation) <= 1e-10);
                CHECK(std::abs(sol.residuals.t_gap) <= 1e-8);
                CHECK(std::abs(sol.C - 1.0) <= 1e-10);
                // Family p reproduces its own lambda values.
                const auto lam = lambda_components(s, sol.p);
                CHECK(lam.lambda1 == doctest::Approx(sol.lambda1).epsilon(1e-8));
                CHECK(lam.lambda2 == doctest::Approx(sol.lambda2).epsilon(1e-8));
                const double h = 1e-6;
                CHECK(family_F(s, sol.alpha + h, sol.lambda1, sol.lambda2, t, rho) -
                          family_F(s, sol.alpha - h, sol.lambda1, sol.lambda2, t, rho) >
                      0.0);
                const double step = 1e-4;
                if (t + step < r.t_upper) CHECK(solve_lambda2(s, t + step, rho).alpha > sol.alpha);
            }
        }
    }
}

TEST_CASE("one column: gamma_1 = 1") {
    const auto s = load_spec("single_column");
    const auto sol = solve_lambda2(s, midpoint(fiber_roots(s)), 0.6);
    REQUIRE(sol.gamma.size() == 1);
    CHECK(sol.gamma[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("the curve maximizer at rho = 1 is a stationary point when heights match") {
    for (const char* name : {"equal_heights", "single_column"}) {
        const auto s = load_spec(name);
        const auto top = family_curve_maximum(s, 1.0, 24);
        const auto& p = top.solution.p;
        const double base = objective(s, p);
        const double delta = 1e-4;
        for (std::size_t f = 0; f < s.num_fibers(); ++f) {
            for (std::size_t g = 0; g < s.num_fibers(); ++g) {
                if (f == g) continue;
                std::vector<double> w(p.weights().begin(), p.weights().end());
                w[f] += delta;
                w[g] -= delta;
                CHECK(base >= objective(s, NestedDistribution::normalized(s, w)) - 10 * delta * delta);
            }
        }
    }
}

TEST_CASE("family_curve") {
    const auto s = load_spec("equal_heights");
    const auto r = fiber_roots(s);
    const double t = midpoint(r);

    const auto pair = family_curve(s, 1.0, {t, t + 1e-3});
    REQUIRE(pair.size() == 2);
    REQUIRE(pair[0].solution);
    REQUIRE(pair[1].solution);
    double l1 = 0.0;
    for (std::size_t f = 0; f < s.num_fibers(); ++f) l1 += std::abs(pair[0].solution->p[f] - pair[1].solution->p[f]);
    CHECK(l1 < 1e-2);

    CHECK(family_curve(s, 1.0, {t}).size() == 1);
    CHECK_THROWS_AS(family_curve(s, 1.0, {t, r.t_upper + 0.01}), PreconditionError);
    CHECK_THROWS_AS(family_curve(s, 1.0, {r.t_lower}), PreconditionError);
}
