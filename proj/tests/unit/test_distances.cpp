#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../oracles.hpp"
#include "clab/distances.hpp"
#include "clab/errors.hpp"
#include "clab/lp.hpp"
#include "clab/numeric.hpp"

using namespace clab;
using std::numbers::pi;

namespace {

std::vector<std::vector<double>> raw(const std::vector<FiniteMeasure>& set) {
    std::vector<std::vector<double>> out;
    for (const auto& p : set) out.emplace_back(p.weights().begin(), p.weights().end());
    return out;
}

}  // namespace

TEST_CASE("simplex solves a textbook LP") {
    // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3  ->  x=3, y=1, value 11
    lp::Problem p;
    p.objective = {-3, -2};
    p.constraints = {{{1, 1}, lp::Sense::less_equal, 4}, {{1, 3}, lp::Sense::less_equal, 6},
                     {{1, 0}, lp::Sense::less_equal, 3}};
    auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(sol.objective == doctest::Approx(-11));
    CHECK(sol.x[0] == doctest::Approx(3));
    CHECK(sol.x[1] == doctest::Approx(1));
}

TEST_CASE("simplex handles equality, >= rows and detects infeasibility") {
    lp::Problem p;
    p.objective = {1, 1};
    p.constraints = {{{1, 1}, lp::Sense::equal, 2}, {{1, -1}, lp::Sense::greater_equal, 1}};
    auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(sol.objective == doctest::Approx(2));

    lp::Problem bad;
    bad.objective = {1};
    bad.constraints = {{{1}, lp::Sense::less_equal, 1}, {{1}, lp::Sense::greater_equal, 2}};
    CHECK(lp::solve(bad).status == lp::Status::infeasible);

    lp::Problem unbounded;
    unbounded.objective = {-1};
    unbounded.constraints = {{{1}, lp::Sense::greater_equal, 1}};
    CHECK(lp::solve(unbounded).status == lp::Status::unbounded);
}

TEST_CASE("total_variation examples") {
    CHECK(total_variation(FiniteMeasure({1, 0}), FiniteMeasure({0, 1})) == 1.0);
    FiniteMeasure p({0.2, 0.3, 0.5});
    CHECK(total_variation(p, p) == 0.0);
    CHECK(total_variation(FiniteMeasure({0.5, 0.5}), FiniteMeasure({0.7, 0.3})) == doctest::Approx(0.2));
    CHECK_THROWS_AS(total_variation(FiniteMeasure({1, 0}), FiniteMeasure({1, 0, 0})), ValidationError);
}

TEST_CASE("hull_variation examples") {
    {
        std::vector<FiniteMeasure> a{FiniteMeasure({1, 0, 0})};
        std::vector<FiniteMeasure> b{FiniteMeasure({0, 1, 0}), FiniteMeasure({0, 0, 1})};
        CHECK(hull_variation(a, b).value == doctest::Approx(1.0));
    }
    {
        std::vector<FiniteMeasure> a{FiniteMeasure({0.5, 0.5})};
        std::vector<FiniteMeasure> b{FiniteMeasure({1, 0}), FiniteMeasure({0, 1})};
        auto r = hull_variation(a, b);
        CHECK(r.value == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(r.mixture_q[0] == doctest::Approx(0.5));
        CHECK(r.mixture_q[1] == doctest::Approx(0.5));
    }
    {
        // one-dimensional sweep over the B-mixture weight gives 0.5
        std::vector<FiniteMeasure> a{FiniteMeasure({0.7, 0.2, 0.1})};
        std::vector<FiniteMeasure> b{FiniteMeasure({0.2, 0.7, 0.1}), FiniteMeasure({0.2, 0.1, 0.7})};
        CHECK(hull_variation(a, b).value == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(oracle::hull_grid_search(raw(a), raw(b), 1000) == doctest::Approx(0.5).epsilon(1e-9));
    }
    std::vector<FiniteMeasure> empty;
    std::vector<FiniteMeasure> one{FiniteMeasure({1, 0})};
    CHECK_THROWS_AS(hull_variation(empty, one), ValidationError);
    std::vector<FiniteMeasure> other{FiniteMeasure({1, 0, 0})};
    CHECK_THROWS_AS(hull_variation(one, other), ValidationError);
}

TEST_CASE("hull_variation result invariants and properties on random instances") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t k = 2 + trial % 3;
        const std::size_t na = 1 + trial % 3, nb = 1 + (trial / 3) % 3;
        std::vector<FiniteMeasure> a, b;
        for (std::size_t i = 0; i < na; ++i) a.emplace_back(oracle::random_simplex(gen, k), 1e-12);
        for (std::size_t i = 0; i < nb; ++i) b.emplace_back(oracle::random_simplex(gen, k), 1e-12);
        auto r = hull_variation(a, b);
        double sa = 0, sb = 0;
        for (double w : r.mixture_p) {
            CHECK(w >= 0.0);
            sa += w;
        }
        for (double w : r.mixture_q) {
            CHECK(w >= 0.0);
            sb += w;
        }
        CHECK(std::abs(sa - 1) <= 1e-9);
        CHECK(std::abs(sb - 1) <= 1e-9);
        CHECK(std::abs(r.value - total_variation(mixture(a, r.mixture_p), mixture(b, r.mixture_q))) <= 1e-8);

        double min_pair = 1.0;
        for (const auto& p : a)
            for (const auto& q : b) min_pair = std::min(min_pair, total_variation(p, q));
        CHECK(r.value <= min_pair + 1e-9);
        if (na == 1 && nb == 1) CHECK(r.value == doctest::Approx(min_pair).epsilon(1e-9));

        // symmetric
        CHECK(hull_variation(b, a).value == doctest::Approx(r.value).epsilon(1e-9));
        // monotone under enlarging a set
        auto bigger = a;
        bigger.emplace_back(oracle::random_simplex(gen, k), 1e-12);
        CHECK(hull_variation(bigger, b).value <= r.value + 1e-9);

        // grid oracle, step 0.01 -> within 0.01
        CHECK(std::abs(r.value - oracle::hull_grid_search(raw(a), raw(b), 100)) <= 0.011);
    }
}

TEST_CASE("kraft_bound examples") {
    std::vector<FiniteMeasure> a{FiniteMeasure({0.7, 0.3})};
    std::vector<FiniteMeasure> b{FiniteMeasure({0.3, 0.7})};
    CHECK(kraft_bound(a, b) == doctest::Approx(0.6));
    CHECK(oracle::best_deterministic_test({0.7, 0.3}, {0.3, 0.7}) == doctest::Approx(0.6));
    CHECK(kraft_bound(a, a) == doctest::Approx(1.0));
    std::vector<FiniteMeasure> d0{FiniteMeasure({1, 0})}, d1{FiniteMeasure({0, 1})};
    CHECK(kraft_bound(d0, d1) == doctest::Approx(0.0));
}

TEST_CASE("optimal_test examples") {
    {
        std::vector<FiniteMeasure> a{FiniteMeasure({0.7, 0.3})};
        std::vector<FiniteMeasure> b{FiniteMeasure({0.3, 0.7})};
        auto t = optimal_test(a, b);
        CHECK(t.test.reject_prob()[0] == 0.0);
        CHECK(t.test.reject_prob()[1] == 1.0);
        CHECK(t.test.alpha(a[0]) == doctest::Approx(0.3));
        CHECK(t.test.beta(b[0]) == doctest::Approx(0.3));
    }
    {
        std::vector<FiniteMeasure> a{FiniteMeasure({0.4, 0.6})};
        auto t = optimal_test(a, a);
        CHECK(t.test.alpha(a[0]) + t.test.beta(a[0]) == doctest::Approx(1.0));
    }
    {
        std::vector<FiniteMeasure> a{FiniteMeasure({1, 0})};
        std::vector<FiniteMeasure> b{FiniteMeasure({0, 1})};
        auto t = optimal_test(a, b);
        CHECK(t.test.alpha(a[0]) == 0.0);
        CHECK(t.test.beta(b[0]) == 0.0);
    }
}

TEST_CASE("optimal_test attains the Kraft bound on the closest mixtures") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t k = 2 + trial % 3;
        std::vector<FiniteMeasure> a{FiniteMeasure(oracle::random_simplex(gen, k), 1e-12),
                                     FiniteMeasure(oracle::random_simplex(gen, k), 1e-12)};
        std::vector<FiniteMeasure> b{FiniteMeasure(oracle::random_simplex(gen, k), 1e-12)};
        auto t = optimal_test(a, b);
        const double sum = t.test.alpha(t.closest_p) + t.test.beta(t.closest_q);
        CHECK(std::abs(sum - kraft_bound(a, b)) <= 1e-9);
    }
}

TEST_CASE("RandomizedTest validates probabilities") {
    CHECK_THROWS_AS(RandomizedTest({0.5, 1.5}), ValidationError);
}

TEST_CASE("ks_distance examples") {
    CHECK(ks_distance(DensitySpec::pu_family(0.4), DensitySpec::uniform()) == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(ks_distance(DensitySpec::one_plus_sine(3), DensitySpec::one_plus_sine(3)) == 0.0);
    // F_1(x) - x = (1 - cos 2 pi x) / (2 pi), largest at x = 1/2
    CHECK(std::abs(ks_distance(DensitySpec::one_plus_sine(1), DensitySpec::uniform()) - 1 / pi) <= 1e-9);
    // brute force over a fine grid never exceeds the reported supremum
    const auto a = DensitySpec::cesaro_mixture(5);
    const auto b = DensitySpec::pu_family(0.3);
    const double ks = ks_distance(a, b);
    double grid_max = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double x = i / 200000.0;
        grid_max = std::max(grid_max, std::abs(a.cdf(x) - b.cdf(x)));
    }
    CHECK(grid_max <= ks + 1e-12);
    CHECK(ks - grid_max <= 1e-8);
}

TEST_CASE("density total variation matches quadrature of |f - g|") {
    CHECK(std::abs(total_variation(DensitySpec::uniform(), DensitySpec::one_plus_sine(1)) - 1 / pi) <= 1e-12);
    CHECK(total_variation(DensitySpec::uniform(), DensitySpec::pu_family(0.4)) == doctest::Approx(0.2));
    for (const auto& [p, q] : {std::pair{DensitySpec::uniform(), DensitySpec::cesaro_mixture(4)},
                               std::pair{DensitySpec::one_plus_sine(3), DensitySpec::pu_family(0.6)},
                               std::pair{DensitySpec::cesaro_mixture(16), DensitySpec::uniform()}}) {
        double quad = 0.0;
        const int panels = 2048;
        for (int i = 0; i < panels; ++i) {
            quad += numeric::adaptive_simpson([&](double x) { return std::abs(p.density(x) - q.density(x)); },
                                              static_cast<double>(i) / panels, static_cast<double>(i + 1) / panels,
                                              1e-13);
        }
        CHECK(std::abs(total_variation(p, q) - 0.5 * quad) <= 1e-8);
    }
}
