#include <doctest.h>

#include <cmath>

#include "clab/errors.hpp"
#include "clab/simulation.hpp"

using namespace clab;

TEST_CASE("replayed generators are bit-identical") {
    Rng a({42, 3}), b({42, 3}), c({42, 4});
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differs = differs || x != c.next_u64();
    }
    CHECK(differs);

    Rng r1 = Rng::for_replication({7, 0}, 12), r2 = Rng::for_replication({7, 0}, 12);
    const auto s1 = sample_iid(DensitySpec::one_plus_sine(3), 200, r1);
    const auto s2 = sample_iid(DensitySpec::one_plus_sine(3), 200, r2);
    CHECK(s1 == s2);
}

TEST_CASE("uniform draws stay in range") {
    Rng g({1, 0});
    for (int i = 0; i < 100000; ++i) {
        const double u = g.uniform();
        CHECK((u >= 0.0 && u < 1.0));
        const double v = g.uniform_open();
        CHECK((v > 0.0 && v < 1.0));
    }
}

TEST_CASE("sample_iid on finite alphabets") {
    Rng g({5, 0});
    for (auto x : sample_iid(FiniteMeasure({1, 0}), 100, g)) CHECK(x == 0);

    const auto draws = sample_iid(FiniteMeasure({0.5, 0.5}), 100000, g);
    double ones = 0;
    for (auto x : draws) ones += x == 0 ? 1 : 0;
    CHECK(std::abs(ones / 1e5 - 0.5) <= 0.005);
    CHECK_THROWS_AS(sample_iid(FiniteMeasure({1, 0}), 0, g), ValidationError);
}

TEST_CASE("density samples follow the CDF") {
    Rng g({9, 1});
    const auto spec = DensitySpec::pu_family(0.4);
    const auto xs = sample_iid(spec, 50000, g);
    for (double t : {0.25, 0.5, 0.8}) {
        double below = 0;
        for (double x : xs) below += x <= t ? 1 : 0;
        const double p = spec.cdf(t);
        CHECK(std::abs(below / 50000 - p) <= 4 * std::sqrt(p * (1 - p) / 50000));
    }
}

TEST_CASE("Poisson process sampling") {
    const PoissonModel m(1.0, FiniteMeasure({0.3, 0.7}));
    double total = 0, first = 0;
    for (std::uint64_t r = 0; r < 10000; ++r) {
        Rng g = Rng::for_replication({77, 0}, r);
        const auto atoms = sample_poisson_process(m, 100, g);
        total += static_cast<double>(atoms.size());
        for (auto a : atoms) first += a == 0 ? 1 : 0;
    }
    const double mean = total / 10000;
    CHECK(std::abs(mean - 100) <= 3 * 10 / std::sqrt(10000.0) * 10);
    CHECK(std::abs(mean - 100) <= 0.3 * 3);
    const double frac = first / total;
    CHECK(std::abs(frac - 0.3) <= 3 * std::sqrt(0.21 / total));

    const PoissonModel tiny(1e-12, FiniteMeasure({1.0}));
    Rng g({1, 1});
    CHECK(sample_poisson_process(tiny, 1, g).empty());
    const PoissonModel huge(1e8, FiniteMeasure({1.0}));
    CHECK_THROWS_AS(sample_poisson_process(huge, 100, g), ResourceError);
}

TEST_CASE("Poisson sampler mean and variance for large means") {
    Rng g({123, 0});
    for (double mean : {3.0, 25.0, 400.0}) {
        double s = 0, s2 = 0;
        const int reps = 40000;
        for (int i = 0; i < reps; ++i) {
            const double x = static_cast<double>(g.poisson(mean));
            s += x;
            s2 += x * x;
        }
        const double m = s / reps, v = s2 / reps - m * m;
        CHECK(std::abs(m - mean) <= 4 * std::sqrt(mean / reps));
        CHECK(std::abs(v / mean - 1) <= 0.05);
    }
}

TEST_CASE("poisson_atom_tail_bound") {
    CHECK(poisson_atom_tail_bound(1.0, 100, 0.5) == doctest::Approx(2.021739929258346e-5).epsilon(1e-12));
    CHECK(poisson_atom_tail_bound(1.0, 100, 1e-9) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK_THROWS_AS(poisson_atom_tail_bound(1.0, 100, 1.0), ValidationError);
    CHECK_THROWS_AS(poisson_atom_tail_bound(1.0, 100, 0.0), ValidationError);

    // Monte Carlo frequency of |N - n l| > n x stays under the bound
    const double lambda = 2.0, x = 0.3;
    const std::size_t n = 20;
    const auto rep = estimate_probability(
        [&](Rng& g) {
            const double count = static_cast<double>(g.poisson(n * lambda));
            return std::abs(count - n * lambda) > n * x;
        },
        20000, {8, 0}, 2);
    const double bound = poisson_atom_tail_bound(lambda, n, x);
    CHECK(rep.estimate <= bound + 3 * std::sqrt(bound * (1 - std::min(bound, 1.0)) / 20000));
}

TEST_CASE("Gaussian sequence sampling") {
    Rng g({3, 0});
    const GaussianSequenceModel quiet({1.0, -2.0, 0.5}, 1e-15);
    const auto y = sample_gaussian_sequence(quiet, g);
    CHECK(std::abs(y[0] - 1.0) <= 1e-12);
    CHECK(std::abs(y[1] + 2.0) <= 1e-12);

    const GaussianSequenceModel noise(std::vector<double>(10000, 0.0), 1.0);
    const auto z = sample_gaussian_sequence(noise, g);
    double mean = 0;
    for (double v : z) mean += v / 10000;
    CHECK(std::abs(mean) <= 0.03);

    const GaussianSequenceModel m({0.5, 1.0, -1.0}, 0.7);
    const std::vector<double> f{1.0, 2.0, -0.5};
    double s = 0, s2 = 0;
    for (int r = 0; r < 10000; ++r) {
        const auto obs = sample_gaussian_sequence(m, g);
        double stat = 0;
        for (std::size_t j = 0; j < 3; ++j) stat += f[j] * obs[j];
        s += stat;
        s2 += stat * stat;
    }
    const double mu = 0.5 + 2.0 + 0.5, var = 0.49 * (1 + 4 + 0.25);
    const double em = s / 10000, ev = s2 / 10000 - em * em;
    CHECK(std::abs(em - mu) <= 4 * std::sqrt(var / 10000));
    CHECK(std::abs(ev / var - 1) <= 0.06);

    CHECK_THROWS_AS(GaussianSequenceModel({}, 1.0), ValidationError);
    CHECK_THROWS_AS(GaussianSequenceModel({1.0}, 0.0), ValidationError);
}

TEST_CASE("midpoint test error matches the normal CDF") {
    // error = Phi(-|s1-s0| / (2 eps)) for each role; 2 Phi(-1/(2 eps)) in total
    const std::vector<double> s0{0.0, 0.0}, s1{1.0, 0.0};
    const auto t = midpoint_test(s0, s1);
    const auto a = estimate_error(t, GaussianSequenceModel(s0, 0.5), Role::hypothesis, 100000, {4, 0}, 4);
    const auto b = estimate_error(t, GaussianSequenceModel(s1, 0.5), Role::alternative, 100000, {4, 1}, 4);
    const double half = 0.3173105078629141 / 2;
    CHECK(std::abs(a.estimate - half) <= 3 * std::sqrt(half * (1 - half) / 1e5));
    CHECK(std::abs(b.estimate - half) <= 3 * std::sqrt(half * (1 - half) / 1e5));
    CHECK_THROWS_AS(midpoint_test(s0, s0), ConstructionError);
}

TEST_CASE("simulated frequency test errors agree with exact enumeration") {
    const auto r = separation({{0.5, 0.5}}, {{1, 0}});
    FrequencyTest t(r, Partition::identity(2), 2);
    const Model p = FiniteMeasure({0.5, 0.5});
    const auto rep = estimate_error(t, p, Role::hypothesis, 100000, {10, 0}, 3);
    CHECK(std::abs(rep.estimate - 0.25) <= 3 * std::sqrt(0.25 * 0.75 / 1e5));
    CHECK(rep.ci_low <= 0.25);
    CHECK(rep.ci_high >= 0.25);

    const auto r2 = separation({{0.5, 0.5}}, {{0.7, 0.3}});
    for (std::size_t n : {5, 20, 60}) {
        FrequencyTest tn(r2, Partition::identity(2), n);
        const Model q = FiniteMeasure({0.7, 0.3});
        const double exact = exact_error(tn, q, Role::alternative);
        const auto mc = estimate_error(tn, q, Role::alternative, 100000, {11, n}, 2);
        CHECK(std::abs(mc.estimate - exact) <= 3 * std::sqrt(exact * (1 - exact) / 1e5) + 1e-12);
    }

    CHECK_THROWS_AS(estimate_error(t, p, Role::hypothesis, 50, {1, 0}), ValidationError);
}

TEST_CASE("constant-accept randomized test never rejects") {
    const RandomizedTest accept({0.0, 0.0});
    const auto rep = estimate_error(accept, FiniteMeasure({0.4, 0.6}), Role::hypothesis, 1000, {2, 0});
    CHECK(rep.estimate == 0.0);
    CHECK(rep.ci_low == 0.0);
    CHECK(rep.ci_high > 0.0);
}

TEST_CASE("estimates do not depend on the worker count") {
    const auto r = separation({{0.5, 0.5}}, {{0.7, 0.3}});
    FrequencyTest t(r, Partition::identity(2), 30);
    const Model p = FiniteMeasure({0.5, 0.5});
    const auto one = estimate_error(t, p, Role::hypothesis, 5000, {99, 0}, 1);
    const auto many = estimate_error(t, p, Role::hypothesis, 5000, {99, 0}, 7);
    CHECK(one.events == many.events);
}

TEST_CASE("confidence half-width shrinks like 1/sqrt(R)") {
    const auto a = make_report(2500, 10000, 0);
    const auto b = make_report(5000, 20000, 0);
    CHECK(b.half_width_95 / a.half_width_95 == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(a.half_width_95 == doctest::Approx(1.96 * std::sqrt(0.25 * 0.75 / 10000)));
}

TEST_CASE("discernibility curves") {
    const std::vector<std::size_t> grid{0, 10, 50, 100, 200, 512};
    {
        const auto r = separation({{1, 0}}, {{0, 1}});
        const auto s = interleave({frequency_sequence(r, "perfect")}, 512);
        const std::vector<double> p{1, 0};
        const auto c = discernibility_paths(s, p, Role::hypothesis, 512, 200, grid, {1, 0});
        for (double f : c.fraction) CHECK(f == 0.0);
    }
    {
        const auto r = separation({{0.5, 0.5}}, {{0.9, 0.1}});
        const auto s = interleave({frequency_sequence(r, "single")}, 512);
        const std::vector<double> p{0.5, 0.5};
        const auto c1 = discernibility_paths(s, p, Role::hypothesis, 512, 2000, grid, {2, 0}, 1);
        const auto c4 = discernibility_paths(s, p, Role::hypothesis, 512, 2000, grid, {2, 0}, 4);
        CHECK(c1.erring_paths == c4.erring_paths);
        CHECK(c1.fraction.front() > 0.0);
        for (std::size_t i = 1; i < c1.fraction.size(); ++i) CHECK(c1.fraction[i] <= c1.fraction[i - 1]);
        CHECK(c1.fraction.back() == 0.0);

        // any error at n = 1 is at least as likely as the exact error at n = 1
        FrequencyTest t1(r, Partition::identity(2), 1);
        const double exact1 = exact_error(t1, p, Role::hypothesis);
        CHECK(c1.fraction.front() + 3 * std::sqrt(0.25 / 2000) >= exact1);
    }
}
