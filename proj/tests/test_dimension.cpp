#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "sponge/dimension.hpp"
#include "sponge/error.hpp"
#include "sponge/random.hpp"
#include "support.hpp"

using namespace sponge;
using sponge::testing::make_spec;
using sponge::testing::uniform_spec;

namespace {

NestedDistribution random_distribution(const SpongeSpec& s, Rng& rng) {
    std::vector<double> w(s.num_fibers());
    for (double& v : w) v = rng.exponential();
    return NestedDistribution::normalized(s, std::move(w));
}

// Grid-aligned: c = 1/2, b = 1/4, a = 1/8 with chosen boxes 3, 1 | 2.
SpongeSpec small_grid_spec() {
    return make_spec({0.5, 0.5}, {{0.25, 0.25}, {0.25}}, {{{0.125, 0.125, 0.125}, {0.125}}, {{0.125, 0.125}}});
}

}  // namespace

TEST_CASE("lambda components") {
    SUBCASE("concentrated on one fiber") {
        const auto s = sponge::testing::load_spec("skewed");
        const auto l = lambda_components(s, NestedDistribution::concentrated(s, 1, 0));
        CHECK(l.lambda1 == 0.0);
        CHECK(l.lambda2 == 0.0);
    }
    SUBCASE("uniform over two columns of two") {
        const auto s = make_spec({0.5, 0.5}, {{0.25, 0.25}, {0.25, 0.25}},
                                 {{{0.25}, {0.25}}, {{0.25}, {0.25}}});
        const auto l = lambda_components(s, NestedDistribution::uniform(s));
        CHECK(l.lambda1 == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(l.lambda2 == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("three columns with one row each") {
        const double r = 1.0 / 3.0;
        const auto s = make_spec({r, r, r}, {{r}, {r}, {r}}, {{{r}}, {{r}}, {{r}}});
        const auto l = lambda_components(s, NestedDistribution::uniform(s));
        CHECK(l.lambda1 == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(l.lambda2 == 0.0);
    }
}

TEST_CASE("t(p) on single fibers") {
    const auto s = make_spec({0.9}, {{0.5, 0.25, 0.15}}, {{{0.5, 0.5}, {0.25, 0.25}, {0.15}}});
    const auto s2 = make_spec({0.9}, {{0.5}}, {{{0.5, 0.25}}});
    CHECK(t_of_p(s, NestedDistribution::concentrated(s, 0, 0)) == 1.0);
    CHECK(t_of_p(s, NestedDistribution::concentrated(s, 0, 2)) == 0.0);
    const double golden = std::log((1.0 + std::sqrt(5.0)) / 2.0) / std::log(2.0);
    CHECK(t_of_p(s2, NestedDistribution::uniform(s2), 0.0) == doctest::Approx(golden).epsilon(1e-13));
    CHECK(std::abs(t_of_p(s2, NestedDistribution::uniform(s2)) - golden) < 1e-11);
    CHECK(golden == doctest::Approx(0.694242).epsilon(1e-6));
}

TEST_CASE("t(p) residual and range on random pairs") {
    Rng rng(5);
    for (int n = 0; n < 300; ++n) {
        const auto s = sponge::testing::random_spec(rng);
        const auto p = random_distribution(s, rng);
        const double t = t_of_p(s, p, 1e-12);
        CHECK(t >= 0.0);
        CHECK(t <= 1.0);
        if (t > 0.0 && t < 1.0) CHECK(std::abs(t_residual(s, p, t)) <= 1e-12);
        const auto l = lambda_components(s, p);
        CHECK(l.lambda1 >= 0.0);
        CHECK(l.lambda2 >= 0.0);
        const double v = objective(s, p);
        CHECK(v >= 0.0);
        CHECK(v <= 3.0);
    }
}

TEST_CASE("objective examples") {
    CHECK(objective(uniform_spec(0.5, 2, 2, 2), NestedDistribution::uniform(uniform_spec(0.5, 2, 2, 2))) ==
          doctest::Approx(3.0).epsilon(1e-14));
    const auto single = uniform_spec(0.5, 1, 1, 1);
    CHECK(objective(single, NestedDistribution::uniform(single)) == 0.0);
    const auto moran = uniform_spec(0.4, 2, 2, 2);
    CHECK(objective(moran, NestedDistribution::uniform(moran)) ==
          doctest::Approx(std::log(8.0) / std::log(2.5)).epsilon(1e-13));
}

TEST_CASE("analytic gradient matches central differences") {
    Rng rng(17);
    for (int n = 0; n < 40; ++n) {
        const auto s = sponge::testing::random_spec(rng);
        if (s.num_fibers() < 2) continue;
        const auto p = random_distribution(s, rng);
        const auto g = objective_gradient(s, p);
        // Tangent direction e_f - e_0 keeps the total mass.
        for (std::size_t f = 1; f < s.num_fibers(); ++f) {
            const double h = 1e-6 * std::min(p[f], p[0]);
            std::vector<double> wp(p.weights().begin(), p.weights().end()), wm = wp;
            wp[f] += h;
            wp[0] -= h;
            wm[f] -= h;
            wm[0] += h;
            const double fd = (objective(s, NestedDistribution::normalized(s, wp)) -
                               objective(s, NestedDistribution::normalized(s, wm))) /
                              (2 * h);
            CHECK(g[f] - g[0] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
        }
    }
}

TEST_CASE("gradient pushes inward near every face") {
    const auto s = sponge::testing::load_spec("skewed");
    for (std::size_t f = 0; f < s.num_fibers(); ++f) {
        std::vector<double> w(s.num_fibers(), 1.0);
        w[f] = 1e-10;
        const auto p = NestedDistribution::normalized(s, w);
        const auto g = objective_gradient(s, p);
        const double mean = std::accumulate(g.begin(), g.end(), 0.0) / g.size();
        CHECK(g[f] > mean);
    }
}

TEST_CASE("objective is invariant under relabeling") {
    const auto s = make_spec({0.5, 0.3}, {{0.4, 0.3}, {0.3, 0.2}}, {{{0.3, 0.2, 0.1}, {0.25}}, {{0.2, 0.1}, {0.15, 0.1}}});
    // Swap i, reverse j within each i, reverse k within each fiber.
    const auto r = make_spec({0.3, 0.5}, {{0.2, 0.3}, {0.3, 0.4}}, {{{0.1, 0.15}, {0.1, 0.2}}, {{0.25}, {0.1, 0.2, 0.3}}});
    Rng rng(23);
    for (int n = 0; n < 50; ++n) {
        const auto p = random_distribution(s, rng);
        const auto q = NestedDistribution::from_nested(r, {{p[3], p[2]}, {p[1], p[0]}});
        CHECK(objective(r, q) == doctest::Approx(objective(s, p)).epsilon(1e-12));
    }
}

TEST_CASE("continuity under small perturbations") {
    const auto s = sponge::testing::load_spec("skewed");
    Rng rng(29);
    const double eps = 1e-6;
    for (int n = 0; n < 50; ++n) {
        const auto p = random_distribution(s, rng);
        std::vector<double> w(p.weights().begin(), p.weights().end());
        const std::size_t from = n % w.size(), to = (n + 1) % w.size();
        const double move = std::min(eps, w[from]);
        w[from] -= move;
        w[to] += move;
        const auto q = NestedDistribution::normalized(s, w);
        CHECK(std::abs(objective(s, q) - objective(s, p)) <= 100.0 * eps * std::log(1.0 / eps));
    }
}

TEST_CASE("maximize: full cube, singleton, Moran") {
    const auto cube = maximize(uniform_spec(0.5, 2, 2, 2));
    CHECK(std::abs(cube.dimension - 3.0) <= 1e-8);
    CHECK(cube.diagnostics.exact_by_symmetry);
    CHECK_FALSE(cube.hypothesis.holds);
    CHECK_FALSE(cube.warnings.empty());

    const auto single = maximize(uniform_spec(0.5, 1, 1, 1));
    CHECK(std::abs(single.dimension) <= 1e-12);

    for (double r : {0.3, 0.25, 0.2}) {
        const auto rep = maximize(uniform_spec(r, 2, 3, 2));
        CHECK(std::abs(rep.dimension - std::log(12.0) / std::log(1.0 / r)) <= 1e-6);
        CHECK(rep.dimension == doctest::Approx(rep.lambda_total + rep.t_star).epsilon(1e-15));
    }
}

TEST_CASE("maximize agrees with an exhaustive simplex grid on a grid-aligned pattern") {
    const auto s = small_grid_spec();
    const auto rep = maximize(s);
    double best = 0.0;
    const int N = 200;
    for (int q1 = 0; q1 <= N; ++q1) {
        for (int q2 = 0; q1 + q2 <= N; ++q2) {
            const std::vector<double> w{double(q1) / N, double(q2) / N, double(N - q1 - q2) / N};
            best = std::max(best, objective(s, NestedDistribution::normalized(s, w)));
        }
    }
    CHECK(std::abs(rep.dimension - best) <= 1e-3);
    CHECK(rep.dimension >= best - 1e-9);
    CHECK(rep.dimension == doctest::Approx(sponge::testing::grid_sponge_dimension(s)).epsilon(1e-9));
}

TEST_CASE("maximize matches the grid-sponge closed form") {
    const auto s = sponge::testing::load_spec("grid_carpet");
    CHECK(std::abs(maximize(s).dimension - sponge::testing::grid_sponge_dimension(s)) <= 1e-8);
}

TEST_CASE("sup dominates any evaluation") {
    Rng rng(31);
    for (int n = 0; n < 6; ++n) {
        const auto s = sponge::testing::random_spec(rng);
        OptimizerConfig cfg;
        cfg.restarts = 8;
        const auto rep = maximize(s, cfg);
        CHECK(rep.dimension >= 0.0);
        CHECK(rep.dimension <= 3.0);
        for (int k = 0; k < 200; ++k) CHECK(rep.dimension >= objective(s, random_distribution(s, rng)) - 1e-9);
    }
}

TEST_CASE("restarts give the same report with any thread count") {
    const auto s = sponge::testing::load_spec("dominant_c");
    OptimizerConfig one;
    OptimizerConfig four;
    four.threads = 4;
    const auto a = maximize(s, one), b = maximize(s, four);
    CHECK(a.dimension == b.dimension);
    CHECK(std::equal(a.p_star.weights().begin(), a.p_star.weights().end(), b.p_star.weights().begin()));
    CHECK(a.diagnostics.best_source == b.diagnostics.best_source);
}

TEST_CASE("projected ascent converges from the simplex boundary") {
    const auto s = sponge::testing::load_spec("skewed");
    OptimizerConfig cfg;
    const auto r = projected_ascent(s, NestedDistribution::concentrated(s, 0, 0), cfg);
    CHECK(r.converged);
    CHECK(r.stationarity <= cfg.stationarity_tol);
    CHECK(r.p.is_interior());
    CHECK(r.value == doctest::Approx(maximize(s).dimension).epsilon(1e-9));
}

TEST_CASE("preconditions") {
    const auto s = sponge::testing::load_spec("skewed");
    const auto other = uniform_spec(0.5, 1, 1, 1);
    CHECK_THROWS_AS(lambda_components(other, NestedDistribution::uniform(s)), PreconditionError);
    CHECK_THROWS_AS(objective_gradient(s, NestedDistribution::concentrated(s, 0, 0)), PreconditionError);
    CHECK_THROWS_AS(NestedDistribution::from_weights(s, {0.5, 0.5, 0.5, 0.5}), PreconditionError);
}
