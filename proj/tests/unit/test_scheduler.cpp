#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "clab/errors.hpp"
#include "clab/scheduler.hpp"

using namespace clab;

namespace {

TestSequence constant_sequence(std::string label, bool reject, double c, std::size_t onset,
                               double alpha_scale = 1.0, double beta_scale = 1.0) {
    return TestSequence(std::move(label), {{0.5, 0.5}},
                        [reject](std::size_t, std::span<const std::uint64_t>) { return reject; }, c, onset,
                        alpha_scale, beta_scale);
}

}  // namespace

TEST_CASE("block_lengths examples") {
    const std::vector<double> a{0.3, 1.0};
    CHECK(block_lengths(a) == std::vector<std::size_t>{1, 2});
    const std::vector<double> b{1.0, 1.0, 0.5};
    CHECK(block_lengths(b)[2] == 7);
    const std::vector<double> c{0.06, 0.06, 0.06};
    CHECK(block_lengths(c) == std::vector<std::size_t>{1, 71, 85});
    const std::vector<double> bad{1.0, 0.0};
    CHECK_THROWS_AS(block_lengths(bad), ValidationError);
    const std::vector<double> neg{-1.0};
    CHECK_THROWS_AS(block_lengths(neg), ValidationError);
}

TEST_CASE("block_lengths are minimal and monotone in the exponent") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unif(0.01, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t i = 2 + trial % 20;
        std::vector<double> cs(i, 1.0);
        const double c = unif(gen);
        cs.back() = c;
        const std::size_t l = block_lengths(cs).back();
        auto lhs = [&](std::size_t len) { return std::exp(-c * static_cast<double>(len)) / (1 - std::exp(-c)); };
        const double rhs = 1.0 / static_cast<double>(i * i);
        CHECK(lhs(l) <= rhs);
        if (l > 1) CHECK(lhs(l - 1) > rhs);
        cs.back() = c * 1.5;
        CHECK(block_lengths(cs).back() <= l);
    }
}

TEST_CASE("tail_bound examples") {
    CHECK(tail_bound(0, 1.0) == doctest::Approx(1.5819767068693265).epsilon(1e-14));
    CHECK(tail_bound(10, 1.0) == doctest::Approx(7.182163137775451e-5).epsilon(1e-12));
    CHECK(tail_bound(5000, 1.0) == 0.0);
    CHECK(tail_bound(3, 0.5, 2.0) == doctest::Approx(2.0 * std::exp(-1.5)));
    CHECK_THROWS_AS(tail_bound(3, 0.0), ValidationError);
}

TEST_CASE("union_schedule bound arithmetic") {
    const auto a = constant_sequence("a", false, 0.5, 3);
    const auto b = constant_sequence("b", true, 0.2, 7);
    const auto u = union_schedule(a, b);
    CHECK(u.exponent() == 0.2);
    CHECK(u.onset() == 7);
    CHECK(u.alpha_scale() == 2.0);
    CHECK(u.beta_scale() == 1.0);
    const std::vector<std::uint64_t> counts{1, 1};
    CHECK(u.rejects(2, counts));

    // alpha bounds (0.1, 0.2) and beta bounds (0.3, 0.4) at one n
    const double c = 1.0;
    const std::size_t n = 10;
    const double e = std::exp(-c * n);
    const auto x = constant_sequence("x", false, c, 1, 0.1 / e, 0.3 / e);
    const auto y = constant_sequence("y", false, c, 1, 0.2 / e, 0.4 / e);
    const auto xy = union_schedule(x, y);
    CHECK(xy.alpha_bound(n) == doctest::Approx(0.3));
    CHECK(xy.beta_bound(n) == doctest::Approx(0.4));
    CHECK(xy.beta_bound(n) <= std::max(x.beta_bound(n), y.beta_bound(n)) + 1e-15);

    const auto u2 = union_schedule(a, a);
    CHECK(u2.alpha_bound(20) == doctest::Approx(std::min(1.0, 2 * a.alpha_bound(20))));
    CHECK(u2.beta_bound(20) == doctest::Approx(a.beta_bound(20)));

    auto other = TestSequence("z", {{0.2, 0.8}}, [](std::size_t, std::span<const std::uint64_t>) { return false; },
                              1.0, 1);
    CHECK_THROWS_AS(union_schedule(a, other), ValidationError);
}

TEST_CASE("union of perfect tests stays perfect") {
    const auto r0 = separation({{0.5, 0.5, 0.0}}, {{0.0, 0.0, 1.0}});
    const auto s = frequency_sequence(r0, "p");
    const auto u = union_schedule(s, s);
    const std::vector<std::uint64_t> h{3, 2, 0}, alt{0, 0, 5};
    CHECK_FALSE(u.rejects(5, h));
    CHECK(u.rejects(5, alt));
}

TEST_CASE("interleave examples") {
    {
        TestFamily fam{constant_sequence("only", false, 1.0, 1)};
        const auto s = interleave(fam, 50);
        CHECK(s.covered_families() == 1);
        for (std::size_t n = 1; n <= 50; ++n) CHECK(s.family_at(n) == 0);
    }
    {
        TestFamily fam{constant_sequence("f1", false, 1.0, 1), constant_sequence("f2", false, 1.0, 1)};
        const auto s = interleave(fam, 20);
        CHECK(s.family_at(1) == 0);
        CHECK(s.family_at(2) == 0);
        CHECK(s.family_at(3) == 1);
        CHECK(s.family_at(20) == 1);
        CHECK(s.blocks()[0].end == 2);
        CHECK_THROWS_AS(interleave(fam, 1), ValidationError);
    }
    {
        // onsets push boundaries past n0
        TestFamily fam{constant_sequence("f1", false, 1.0, 1), constant_sequence("f2", false, 1.0, 9),
                       constant_sequence("f3", false, 1.0, 4)};
        const auto s = interleave(fam, 100);
        CHECK(s.blocks()[1].start == 11);
        CHECK(s.blocks()[2].start == 12);
        for (std::size_t t = 1; t < s.blocks().size(); ++t) {
            CHECK(s.blocks()[t].start == s.blocks()[t - 1].end + 1);
            CHECK(s.blocks()[t].start > s.family()[s.blocks()[t].family].onset());
        }
    }
    CHECK_THROWS_AS(interleave({}, 10), ValidationError);
}

TEST_CASE("interleaved alpha tails obey the summability chain") {
    TestFamily fam;
    for (int i = 0; i < 8; ++i) fam.push_back(constant_sequence("f" + std::to_string(i), false, 1.0, 1));
    const auto s = interleave(fam, 400);
    const double basel = std::numbers::pi * std::numbers::pi / 6;
    for (std::size_t t = 1; t < s.covered_families(); ++t) {
        const double tail = s.alpha_tail_after_block(t);
        CHECK(tail <= s.chain_bound(t) + 1e-15);
        CHECK(s.chain_bound(t) < basel);
    }
    double prev = 2.0;
    for (std::size_t k = 0; k < 40; ++k) {
        const double tail = s.alpha_tail(k);
        CHECK(tail <= prev);
        prev = tail;
    }
    CHECK(s.alpha_tail(399) < 1e-100);
}

TEST_CASE("beta tails respect nested coverage") {
    TestFamily fam{constant_sequence("f1", false, 0.5, 1), constant_sequence("f2", false, 0.5, 1),
                   constant_sequence("f3", false, 0.5, 1)};
    const auto s = interleave(fam, 200);
    const std::size_t start3 = s.blocks()[2].start;
    CHECK(s.beta_bound(start3 - 1, 2) == 1.0);
    CHECK(s.beta_bound(start3, 2) < 1.0);
    CHECK(s.beta_tail(0, 2) == 1.0);
    CHECK(s.beta_tail(start3 + 20, 2) < 1e-3);
}

TEST_CASE("frequency_sequence refuses zero margin") {
    const auto r = separation({{0.5, 0.5}}, {{0.5, 0.5}});
    CHECK_THROWS_AS(frequency_sequence(r, "piece"), ConstructionError);
}
