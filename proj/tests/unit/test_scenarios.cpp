#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "clab/errors.hpp"
#include "clab/numeric.hpp"
#include "clab/scenarios.hpp"

using namespace clab;
using std::numbers::pi;

namespace {

// Closed-form cell integral of 1 + sin(2 pi i x) over (a, b].
double sine_cell(int i, double a, double b) {
    return (b - a) + (std::cos(2 * pi * i * a) - std::cos(2 * pi * i * b)) / (2 * pi * i);
}

// Composite Simpson on (1/2m) int_0^1 |sum_j sin(2 pi j x)| dx.
double cesaro_tv_oracle(int m, int panels = 20000) {
    auto f = [m](double x) {
        double s = 0.0;
        for (int j = 1; j <= m; ++j) s += std::sin(2 * pi * j * x);
        return std::abs(s);
    };
    const double h = 1.0 / panels;
    double sum = f(0) + f(1);
    for (int k = 1; k < panels; ++k) sum += (k % 2 ? 4 : 2) * f(k * h);
    return sum * h / 3 / (2 * m);
}

const MonteCarlo kSmall{2000, 11, 2};

}  // namespace

TEST_CASE("sine scenario margins") {
    const auto half = scenario_sine_indistinguishable(4, 64, Partition::half_split());
    CHECK(half.rows[0].margin_exact == doctest::Approx(1 / pi).epsilon(1e-12));
    CHECK(half.rows[1].margin_exact <= 1e-12);
    CHECK(half.rows[3].margin_exact <= 1e-12);

    const auto quarter = scenario_sine_indistinguishable(32, 128, Partition::equal_intervals(4));
    for (int i = 1; i <= 5; ++i) {
        double oracle_margin = 0.0;
        for (int c = 0; c < 4; ++c) {
            oracle_margin = std::max(oracle_margin, std::abs(sine_cell(i, c / 4.0, (c + 1) / 4.0) - 0.25));
        }
        CHECK(std::abs(quarter.rows[i - 1].margin_exact - oracle_margin) <= 1e-10);
    }
    for (int i : {8, 16, 32}) CHECK(quarter.rows[i - 1].margin_exact <= 4 / (pi * i));
    double prev = 1.0;
    for (int i : {2, 4, 8, 16, 32}) {
        CHECK(quarter.rows[i - 1].margin_exact <= prev + 1e-15);
        prev = quarter.rows[i - 1].margin_exact;
    }
    CHECK(quarter.hull_variation_discrete >= 0.0);
    CHECK(quarter.kraft_bound_discrete == doctest::Approx(1 - quarter.hull_variation_discrete));
    CHECK_THROWS_AS(scenario_sine_indistinguishable(0, 64, Partition::half_split()), ValidationError);
}

TEST_CASE("Cesaro mixtures") {
    const auto rows = scenario_mazur_mixture(16, 128);
    REQUIRE(rows.size() == 16);
    CHECK(std::abs(rows[0].tv_exact - 1 / pi) <= 1e-9);
    CHECK(rows[0].kraft_exact == doctest::Approx(1 - 1 / pi));
    CHECK(rows[15].tv_exact < rows[0].tv_exact);
    for (int m : {2, 3, 7}) CHECK(std::abs(rows[m - 1].tv_exact - cesaro_tv_oracle(m)) <= 1e-7);
    // A larger hull can only come closer to the uniform density.
    for (std::size_t m = 1; m < rows.size(); ++m) {
        CHECK(rows[m].hull_variation_discrete <= rows[m - 1].hull_variation_discrete + 1e-9);
        CHECK(rows[m].hull_variation_discrete <= rows[m].tv_discrete + 1e-9);
    }
}

TEST_CASE("P_u family") {
    const auto res = scenario_kolmogorov_family({0.0, 0.4}, {100}, 64, kSmall);
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].kraft == doctest::Approx(1.0));
    CHECK(res.rows[1].ks == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(res.rows[1].margin == doctest::Approx(0.2).epsilon(1e-12));
    REQUIRE(res.errors.size() == 1);  // u = 0 has no test
    const auto& e = res.errors[0];
    CHECK(e.alpha_exact + e.beta_exact < 0.1);
    CHECK(std::abs(e.alpha_mc.estimate - e.alpha_exact) <= 4 * std::sqrt(0.25 / 2000));
    CHECK_THROWS_AS(scenario_kolmogorov_family({1.0}, {10}, 64, kSmall), ValidationError);
}

TEST_CASE("generic model pair") {
    const std::vector<Model> a{FiniteMeasure({0.5, 0.5})}, b{FiniteMeasure({0.7, 0.3})};
    const auto res = scenario_model_pair(a, b, Partition::identity(2), {16, 64}, 64, kSmall);
    CHECK(res.separation.margin == doctest::Approx(0.2));
    CHECK(res.kraft_bound == doctest::Approx(0.8));
    CHECK(res.exponent.value == doctest::Approx(0.02132384327219344).epsilon(1e-8));
    REQUIRE(res.errors.size() == 2);
    CHECK(res.errors[1].alpha_exact + res.errors[1].beta_exact < res.errors[0].alpha_exact + res.errors[0].beta_exact);

    const auto same = scenario_model_pair(a, a, Partition::identity(2), {16}, 64, kSmall);
    CHECK(same.separation.margin == 0.0);
    CHECK(same.errors.empty());
    CHECK(same.kraft_bound == doctest::Approx(1.0));
}

TEST_CASE("signal detection") {
    const auto res = scenario_signal_detection({{0.0}}, {{1.0}}, 1, {100.0, 1.0, 0.1}, {20000, 3, 2});
    CHECK(res.rows[2].error_exact == doctest::Approx(2 * numeric::normal_cdf(-5)).epsilon(1e-12));
    CHECK(res.rows[2].error_exact == doctest::Approx(5.7330314375838e-7).epsilon(1e-9));
    CHECK(res.rows[0].error_exact > 0.99);
    CHECK(res.rows[0].error_mc > 0.95);
    CHECK(res.rows[1].error_mc >= res.rows[2].error_mc);

    std::vector<double> decay;
    for (int j = 1; j <= 64; ++j) decay.push_back(1.0 / j);
    const auto proj = scenario_signal_detection({{0.0}}, {decay}, 64, {0.5}, {1000, 3, 1});
    CHECK(proj.margin == doctest::Approx(1.0));
    CHECK(proj.half_margin_dimension == 1);

    CHECK_THROWS_AS(scenario_signal_detection({{1.0, 2.0}}, {{1.0, 2.0}}, 2, {0.1}, kSmall), ConstructionError);
}

TEST_CASE("nested alternatives") {
    const std::vector<Model> h0{FiniteMeasure({0.5, 0.5})};
    {
        const NestedConfig single{h0, {{FiniteMeasure({0.9, 0.1})}}, Partition::identity(2), {}, {}, 256, {}, 0.01};
        CHECK(nested_family(single).size() == 1);
    }
    {
        // A member of the first piece is still detected by the union test.
        const NestedConfig two{h0,   {{FiniteMeasure({0.9, 0.1})}, {FiniteMeasure({0.1, 0.9})}},
                               Partition::identity(2), {}, {}, 256, {}, 0.01};
        const auto fam = nested_family(two);
        REQUIRE(fam.size() == 2);
        const int n = 100;
        long double beta = 0.0L;
        for (int c = 0; c <= n; ++c) {
            const std::vector<std::uint64_t> counts{static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(n - c)};
            if (!fam[1].rejects(n, counts)) beta += oracle::binomial_pmf(n, c, 0.9L);
        }
        CHECK(static_cast<double>(beta) < 1e-6);
    }
    {
        // Approaching alternatives: every piece separated, no uniform margin.
        std::vector<std::vector<Model>> pieces;
        for (int i = 1; i <= 6; ++i) {
            const double d = std::ldexp(1.0, -i);
            pieces.push_back({FiniteMeasure({0.5 + d, 0.5 - d})});
        }
        const NestedConfig approach{h0, pieces, Partition::identity(2), {}, {}, 256, {}, 0.01};
        std::vector<SeparationReport> reports;
        nested_family(approach, &reports);
        for (int i = 1; i <= 6; ++i) CHECK(reports[i - 1].margin == doctest::Approx(std::ldexp(1.0, -i)));
    }
    {
        const NestedConfig bad{h0, {{FiniteMeasure({0.9, 0.1})}, {FiniteMeasure({0.5, 0.5})}},
                               Partition::identity(2), {}, {}, 256, {}, 0.01};
        try {
            nested_family(bad);
            FAIL("expected ConstructionError");
        } catch (const ConstructionError& e) {
            CHECK(std::string(e.what()).find("piece2") != std::string::npos);
        }
    }
}

TEST_CASE("nested scenario curves and chain") {
    const NestedConfig config{{FiniteMeasure({0.5, 0.5})},
                              {{FiniteMeasure({0.9, 0.1})}, {FiniteMeasure({0.1, 0.9})}},
                              Partition::identity(2),
                              {},
                              {},
                              512,
                              {},
                              0.01};
    const auto res = scenario_nested_alternatives(config, {300, 5, 2});
    CHECK(res.curves.size() == 3);
    for (const auto& m : res.curves) {
        CHECK(std::is_sorted(m.curve.fraction.rbegin(), m.curve.fraction.rend()));
        REQUIRE(m.k_star.has_value());
        CHECK(m.fraction_after_k_star <= 0.05);
        for (std::size_t i = 0; i < m.tail.size(); ++i) CHECK(m.tail[i] <= 1.0);
    }
    for (const auto& c : res.chain) CHECK(c.tail <= c.chain);

    const auto again = scenario_nested_alternatives(config, {300, 5, 1});
    for (std::size_t i = 0; i < res.curves.size(); ++i) CHECK(res.curves[i].curve.erring_paths == again.curves[i].curve.erring_paths);
}

TEST_CASE("Poisson threshold") {
    for (std::size_t n : {20, 50, 200}) {
        const double x = poisson_threshold(1.0, n);
        const double target = 1.0 / (static_cast<double>(n) * n);
        REQUIRE(x < 1.0);
        CHECK(poisson_atom_tail_bound(1.0, n, x) <= target);
        CHECK(poisson_atom_tail_bound(1.0, n, x * (1 - 1e-6)) > target);
    }
    CHECK(poisson_threshold(1.0, 2) == 1.0);  // no x < lambda reaches 1/4
}

TEST_CASE("Poisson scenario") {
    const PoissonModel p1(1.0, FiniteMeasure({0.5, 0.5}));
    const PoissonModel p2(2.0, FiniteMeasure({0.5, 0.5}));
    const auto count = scenario_poisson(p1, p2, {10, 40}, kSmall);
    CHECK(count.shape_margin == 0.0);
    const auto& last = count.rows.back();
    CHECK(last.alpha_exact + last.beta_exact < count.rows[0].alpha_exact + count.rows[0].beta_exact);
    CHECK(last.alpha_exact + last.beta_exact < 0.1);

    const PoissonModel skew(1.0, FiniteMeasure({0.9, 0.1}));
    const auto shape = scenario_poisson(p1, skew, {10, 40}, kSmall);
    CHECK(shape.shape_margin == doctest::Approx(0.4));
    for (const auto& r : shape.rows) {
        const double sd_a = std::sqrt(std::max(r.alpha_exact * (1 - r.alpha_exact), 1e-4) / 2000);
        const double sd_b = std::sqrt(std::max(r.beta_exact * (1 - r.beta_exact), 1e-4) / 2000);
        CHECK(std::abs(r.alpha_mc.estimate - r.alpha_exact) <= 4 * sd_a);
        CHECK(std::abs(r.beta_mc.estimate - r.beta_exact) <= 4 * sd_b);
    }
    CHECK(shape.rows[1].alpha_exact + shape.rows[1].beta_exact < shape.rows[0].alpha_exact + shape.rows[0].beta_exact);

    CHECK_THROWS_AS(scenario_poisson(p1, p1, {10}, kSmall), DegenerateError);
}

TEST_CASE("grid_partition assigns grid cells by midpoint") {
    const auto g = grid_partition(Partition::equal_intervals(4), 8);
    CHECK(g.size() == 4);
    CHECK(g.cell_of_atom(0) == 0);
    CHECK(g.cell_of_atom(1) == 0);
    CHECK(g.cell_of_atom(2) == 1);
    CHECK(g.cell_of_atom(7) == 3);
}
