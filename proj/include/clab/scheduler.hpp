#pragma once

// Interleaving of uniformly consistent test sequences into one sequence that
// errs only finitely often along a sample path.
//
// Family i comes with an exponent c_i and an onset n0_i such that
// alpha(K_{n,i}) <= exp(-c_i n) and beta(K_{n,i}) <= exp(-c_i n) for n > n0_i.
// Block lengths l_i are the smallest integers with
//     exp(-c_i l_i) / (1 - exp(-c_i)) <= i^-2,   l_1 = 1,
// so each block contributes at most i^-2 to the sum of error bounds.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "clab/partition_tests.hpp"

namespace clab {

/// A sequence of tests n -> K_n acting on cell counts of the first n observations.
class TestSequence {
public:
    using Decision = std::function<bool(std::size_t n, std::span<const std::uint64_t> counts)>;

    TestSequence(std::string label, std::vector<Vector> hypothesis, Decision rejects, double exponent,
                 std::size_t onset, double alpha_scale = 1.0, double beta_scale = 1.0);

    const std::string& label() const noexcept { return label_; }
    /// Induced vectors of the hypothesis set; identifies H0 for unions.
    const std::vector<Vector>& hypothesis() const noexcept { return hypothesis_; }
    double exponent() const noexcept { return exponent_; }
    std::size_t onset() const noexcept { return onset_; }
    double alpha_scale() const noexcept { return alpha_scale_; }
    double beta_scale() const noexcept { return beta_scale_; }

    bool rejects(std::size_t n, std::span<const std::uint64_t> counts) const { return rejects_(n, counts); }

    /// min(1, alpha_scale exp(-c n)) for n > onset, 1 otherwise.
    double alpha_bound(std::size_t n) const;
    double beta_bound(std::size_t n) const;

private:
    std::string label_;
    std::vector<Vector> hypothesis_;
    Decision rejects_;
    double exponent_;
    std::size_t onset_;
    double alpha_scale_;
    double beta_scale_;
};

/// Nearest-set frequency tests for the pair in `report`, with the certified
/// Hoeffding exponent unless explicit values are given.
TestSequence frequency_sequence(const SeparationReport& report, std::string label);
TestSequence frequency_sequence(const SeparationReport& report, std::string label, double exponent,
                                std::size_t onset);

/// Rejects iff either constituent rejects. Alpha bounds add, beta bounds take
/// the max; exponent is the smaller one and onset the larger one.
TestSequence union_schedule(const TestSequence& a, const TestSequence& b);

using TestFamily = std::vector<TestSequence>;

/// l_1 = 1 and, for i >= 2, the smallest l with exp(-c_i l)/(1-exp(-c_i)) <= i^-2.
std::vector<std::size_t> block_lengths(std::span<const double> exponents);

/// C exp(-c k).
double tail_bound(std::size_t k, double c, double C);
/// C exp(-c k) with C = 1/(1 - exp(-c)), the geometric tail of exp(-c n).
double tail_bound(std::size_t k, double c);

struct ScheduleBlock {
    std::size_t start;   // first n of the block
    std::size_t end;     // last n of the block (inclusive)
    std::size_t family;  // 0-based family index
    double exponent;
    double bound_at_start;  // certified max(alpha, beta) bound at n = start, clamped to 1
};

class TestSchedule {
public:
    TestSchedule(std::shared_ptr<const TestFamily> family, std::vector<ScheduleBlock> blocks,
                 std::vector<std::size_t> block_lengths, std::size_t n_max);

    const TestFamily& family() const noexcept { return *family_; }
    const std::vector<ScheduleBlock>& blocks() const noexcept { return blocks_; }
    const std::vector<std::size_t>& lengths() const noexcept { return lengths_; }
    std::size_t n_max() const noexcept { return n_max_; }
    /// Families that received at least one n in 1..n_max.
    std::size_t covered_families() const noexcept { return blocks_.size(); }

    std::size_t family_at(std::size_t n) const;
    bool rejects(std::size_t n, std::span<const std::uint64_t> counts) const;

    /// Certified per-n error bound for a hypothesis member.
    double alpha_bound(std::size_t n) const;
    /// Certified per-n error bound for an alternative member of piece `piece`
    /// (0-based); the nested families i >= piece contain it.
    double beta_bound(std::size_t n, std::size_t piece) const;

    /// min(1, sum_{n > k} bound(n)), including the geometric tail beyond n_max
    /// where the last family keeps running.
    double alpha_tail(std::size_t k) const;
    double beta_tail(std::size_t k, std::size_t piece) const;

    /// Unclamped sum of alpha bounds over n > (end of block t-1), t >= 1.
    double alpha_tail_after_block(std::size_t t) const;
    /// max alpha_scale * sum_{s >= t} (s+1)^-2 over the covered blocks.
    double chain_bound(std::size_t t) const;

private:
    double tail(std::size_t k, Role role, std::size_t piece, bool clamp) const;

    std::shared_ptr<const TestFamily> family_;
    std::vector<ScheduleBlock> blocks_;
    std::vector<std::size_t> lengths_;
    std::size_t n_max_;
};

/// Family 1 on n = 1..b_1, family s+1 on n = b_s+1..b_{s+1}, the last
/// covered family through n_max, with b_0 = 1 and
/// b_s = max(b_{s-1} + 1, l_{s+1}, n0_{s+1} + 1).
TestSchedule interleave(TestFamily family, std::size_t n_max);

}  // namespace clab
