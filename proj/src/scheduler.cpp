#include "clab/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clab/errors.hpp"

namespace clab {

namespace {

bool block_inequality_holds(double c, std::size_t i, std::size_t l) {
    const double lhs = std::exp(-c * static_cast<double>(l)) / -std::expm1(-c);
    const double rhs = 1.0 / (static_cast<double>(i) * static_cast<double>(i));
    return lhs <= rhs;
}

double scaled_bound(double scale, double c, std::size_t onset, std::size_t n) {
    if (n <= onset) return 1.0;
    return std::min(1.0, scale * std::exp(-c * static_cast<double>(n)));
}

}  // namespace

TestSequence::TestSequence(std::string label, std::vector<Vector> hypothesis, Decision rejects,
                           double exponent, std::size_t onset, double alpha_scale, double beta_scale)
    : label_(std::move(label)),
      hypothesis_(std::move(hypothesis)),
      rejects_(std::move(rejects)),
      exponent_(exponent),
      onset_(onset),
      alpha_scale_(alpha_scale),
      beta_scale_(beta_scale) {
    if (!(exponent > 0.0) || !std::isfinite(exponent)) {
        throw ValidationError("test sequence '" + label_ + "': exponent must be positive and finite");
    }
    if (onset < 1) {
        throw ValidationError("test sequence '" + label_ + "': onset must be >= 1");
    }
    if (!(alpha_scale >= 1.0) || !(beta_scale >= 1.0)) {
        throw ValidationError("test sequence '" + label_ + "': bound scales must be >= 1");
    }
    if (!rejects_) {
        throw ValidationError("test sequence '" + label_ + "': missing decision rule");
    }
}

double TestSequence::alpha_bound(std::size_t n) const { return scaled_bound(alpha_scale_, exponent_, onset_, n); }

double TestSequence::beta_bound(std::size_t n) const { return scaled_bound(beta_scale_, exponent_, onset_, n); }

TestSequence frequency_sequence(const SeparationReport& report, std::string label) {
    const auto cert = certified_frequency_exponent(report.margin, report.v0.front().size());
    return frequency_sequence(report, std::move(label), cert.exponent, cert.onset);
}

TestSequence frequency_sequence(const SeparationReport& report, std::string label, double exponent,
                                std::size_t onset) {
    if (!(report.margin > 0.0)) {
        throw ConstructionError("piece '" + label + "' has zero separation margin");
    }
    auto decide = [v0 = report.v0, v1 = report.v1](std::size_t, std::span<const std::uint64_t> counts) {
        return nearest_set_rejects(v0, v1, counts);
    };
    return TestSequence(std::move(label), report.v0, std::move(decide), exponent, onset);
}

TestSequence union_schedule(const TestSequence& a, const TestSequence& b) {
    if (a.hypothesis() != b.hypothesis()) {
        throw ValidationError("union_schedule: '" + a.label() + "' and '" + b.label() +
                              "' test different hypothesis sets");
    }
    auto decide = [a, b](std::size_t n, std::span<const std::uint64_t> counts) {
        return a.rejects(n, counts) || b.rejects(n, counts);
    };
    return TestSequence(a.label() + "+" + b.label(), a.hypothesis(), std::move(decide),
                        std::min(a.exponent(), b.exponent()), std::max(a.onset(), b.onset()),
                        a.alpha_scale() + b.alpha_scale(), std::max(a.beta_scale(), b.beta_scale()));
}

std::vector<std::size_t> block_lengths(std::span<const double> exponents) {
    std::vector<std::size_t> out;
    out.reserve(exponents.size());
    for (std::size_t idx = 0; idx < exponents.size(); ++idx) {
        const double c = exponents[idx];
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw ValidationError("block_lengths: exponents must be positive and finite");
        }
        const std::size_t i = idx + 1;
        if (i == 1) {
            out.push_back(1);
            continue;
        }
        const double guess = (2.0 * std::log(static_cast<double>(i)) - std::log(-std::expm1(-c))) / c;
        auto l = static_cast<std::size_t>(std::max(1.0, std::ceil(guess)));
        while (l > 1 && block_inequality_holds(c, i, l - 1)) --l;
        while (!block_inequality_holds(c, i, l)) ++l;
        out.push_back(l);
    }
    return out;
}

double tail_bound(std::size_t k, double c, double C) {
    if (!(c > 0.0) || !(C > 0.0)) {
        throw ValidationError("tail_bound: c and C must be positive");
    }
    return C * std::exp(-c * static_cast<double>(k));
}

double tail_bound(std::size_t k, double c) {
    if (!(c > 0.0)) throw ValidationError("tail_bound: c must be positive");
    return tail_bound(k, c, 1.0 / -std::expm1(-c));
}

// ---------------------------------------------------------------------------

TestSchedule::TestSchedule(std::shared_ptr<const TestFamily> family, std::vector<ScheduleBlock> blocks,
                           std::vector<std::size_t> lengths, std::size_t n_max)
    : family_(std::move(family)), blocks_(std::move(blocks)), lengths_(std::move(lengths)), n_max_(n_max) {}

std::size_t TestSchedule::family_at(std::size_t n) const {
    if (n < 1 || n > n_max_) {
        throw ValidationError("schedule: n outside 1..n_max");
    }
    const auto it = std::ranges::lower_bound(blocks_, n, {}, &ScheduleBlock::end);
    return it->family;
}

bool TestSchedule::rejects(std::size_t n, std::span<const std::uint64_t> counts) const {
    return (*family_)[family_at(n)].rejects(n, counts);
}

double TestSchedule::alpha_bound(std::size_t n) const {
    const std::size_t f = n <= n_max_ ? family_at(n) : blocks_.back().family;
    return (*family_)[f].alpha_bound(n);
}

double TestSchedule::beta_bound(std::size_t n, std::size_t piece) const {
    const std::size_t f = n <= n_max_ ? family_at(n) : blocks_.back().family;
    return f >= piece ? (*family_)[f].beta_bound(n) : 1.0;
}

double TestSchedule::tail(std::size_t k, Role role, std::size_t piece, bool clamp) const {
    double sum = 0.0;
    for (std::size_t n = k + 1; n <= n_max_; ++n) {
        sum += role == Role::hypothesis ? alpha_bound(n) : beta_bound(n, piece);
        if (clamp && sum >= 1.0) return 1.0;
    }
    // The last covered family keeps running past n_max.
    const auto& last = (*family_)[blocks_.back().family];
    const std::size_t from = std::max(k, n_max_) + 1;
    if (role == Role::alternative && blocks_.back().family < piece) {
        return clamp ? 1.0 : std::numeric_limits<double>::infinity();
    }
    if (from <= last.onset()) {
        return clamp ? 1.0 : std::numeric_limits<double>::infinity();
    }
    const double scale = role == Role::hypothesis ? last.alpha_scale() : last.beta_scale();
    const double c = last.exponent();
    sum += scale * std::exp(-c * static_cast<double>(from)) / -std::expm1(-c);
    return clamp ? std::min(1.0, sum) : sum;
}

double TestSchedule::alpha_tail(std::size_t k) const { return tail(k, Role::hypothesis, 0, true); }

double TestSchedule::beta_tail(std::size_t k, std::size_t piece) const {
    return tail(k, Role::alternative, piece, true);
}

double TestSchedule::alpha_tail_after_block(std::size_t t) const {
    if (t < 1 || t >= blocks_.size()) {
        throw ValidationError("alpha_tail_after_block: block index out of range");
    }
    double sum = 0.0;
    for (std::size_t n = blocks_[t].start; n <= n_max_; ++n) {
        const auto& fam = (*family_)[family_at(n)];
        sum += fam.alpha_scale() * std::exp(-fam.exponent() * static_cast<double>(n));
    }
    const auto& last = (*family_)[blocks_.back().family];
    const double c = last.exponent();
    sum += last.alpha_scale() * std::exp(-c * static_cast<double>(n_max_ + 1)) / -std::expm1(-c);
    return sum;
}

double TestSchedule::chain_bound(std::size_t t) const {
    double scale = 1.0;
    double sum = 0.0;
    for (std::size_t s = t; s < blocks_.size(); ++s) {
        const double i = static_cast<double>(blocks_[s].family + 1);
        sum += 1.0 / (i * i);
        scale = std::max(scale, (*family_)[blocks_[s].family].alpha_scale());
    }
    return scale * sum;
}

TestSchedule interleave(TestFamily family, std::size_t n_max) {
    if (family.empty()) {
        throw ValidationError("interleave: empty test family");
    }
    if (n_max < 1) {
        throw ValidationError("interleave: n_max must be >= 1");
    }
    std::vector<double> exponents;
    for (const auto& f : family) exponents.push_back(f.exponent());
    const auto lengths = block_lengths(exponents);

    // boundary[s] is the last n of block s-1; boundary[0] = l_1 = 1.
    std::vector<std::size_t> boundary{lengths[0]};
    for (std::size_t s = 1; s < family.size(); ++s) {
        boundary.push_back(std::max({boundary.back() + 1, lengths[s], family[s].onset() + 1}));
    }
    if (family.size() > 1 && n_max < boundary[1]) {
        throw ValidationError("interleave: n_max = " + std::to_string(n_max) +
                              " is smaller than the first block boundary " + std::to_string(boundary[1]));
    }

    auto fam = std::make_shared<const TestFamily>(std::move(family));
    std::vector<ScheduleBlock> blocks;
    for (std::size_t s = 0; s < fam->size(); ++s) {
        const std::size_t start = s == 0 ? 1 : boundary[s] + 1;
        if (start > n_max) break;
        const std::size_t end = s + 1 < fam->size() ? std::min(boundary[s + 1], n_max) : n_max;
        const auto& f = (*fam)[s];
        blocks.push_back({start, end, s, f.exponent(), std::max(f.alpha_bound(start), f.beta_bound(start))});
    }
    blocks.back().end = n_max;
    return TestSchedule(std::move(fam), std::move(blocks), lengths, n_max);
}

}  // namespace clab
