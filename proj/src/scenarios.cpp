#include "clab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "clab/errors.hpp"
#include "clab/numeric.hpp"

namespace clab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Distinct generator streams for every Monte Carlo estimate of one run.
class StreamCounter {
public:
    explicit StreamCounter(const MonteCarlo& mc) : mc_(mc) {}
    RngSpec next() { return {mc_.seed, next_++}; }

private:
    const MonteCarlo& mc_;
    std::uint64_t next_ = 0;
};

std::vector<FiniteMeasure> discretize_all(const std::vector<Model>& models, std::size_t grid_size) {
    std::vector<FiniteMeasure> out;
    for (const auto& m : models) {
        if (const auto* f = std::get_if<FiniteMeasure>(&m)) {
            out.push_back(*f);
        } else {
            out.push_back(discretize(std::get<DensitySpec>(m), grid_size));
        }
    }
    return out;
}

bool all_densities(const std::vector<Model>& models) {
    return std::ranges::all_of(models, [](const Model& m) { return std::holds_alternative<DensitySpec>(m); });
}

double margin_on(const std::vector<Model>& a, const std::vector<Model>& b, const Partition& p) {
    return separation(a, b, p).margin;
}

double discrete_margin(const DensitySpec& a, const DensitySpec& b, const Partition& partition,
                       std::size_t grid_size) {
    const auto grid = grid_partition(partition, grid_size);
    const std::vector<Model> x{discretize(a, grid_size)}, y{discretize(b, grid_size)};
    return margin_on(x, y, grid);
}

std::vector<FiniteMeasure> sine_family(int count, std::size_t grid_size) {
    std::vector<FiniteMeasure> out;
    for (int i = 1; i <= count; ++i) out.push_back(discretize(DensitySpec::one_plus_sine(i), grid_size));
    return out;
}

SimulationReport worst(const std::vector<SimulationReport>& reports) {
    return *std::ranges::max_element(reports, {}, &SimulationReport::estimate);
}

std::vector<double> padded(const std::vector<double>& s, std::size_t d) {
    if (s.size() > d) throw ValidationError("signal has more coordinates than the model dimension");
    std::vector<double> out(s);
    out.resize(d, 0.0);
    return out;
}

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(s);
}

double log_poisson_pmf(std::uint64_t k, double mean) {
    if (mean == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0);
}

}  // namespace

Partition grid_partition(const Partition& partition, std::size_t grid_size) {
    if (partition.base() != Partition::Base::interval) {
        throw ValidationError("grid_partition: need an interval partition");
    }
    std::vector<std::vector<std::size_t>> cells(partition.size());
    for (std::size_t g = 0; g < grid_size; ++g) {
        const double mid = (static_cast<double>(g) + 0.5) / static_cast<double>(grid_size);
        cells[partition.cell_of_point(mid)].push_back(g);
    }
    for (const auto& c : cells) {
        if (c.empty()) {
            throw ValidationError("grid_partition: grid of " + std::to_string(grid_size) +
                                  " cells is too coarse for partition " + partition.label());
        }
    }
    return Partition::atoms(std::move(cells), grid_size);
}

SineResult scenario_sine_indistinguishable(int i_max, std::size_t grid_size, const Partition& partition) {
    if (i_max < 1) throw ValidationError("sine scenario: i_max must be >= 1");
    const auto uniform = DensitySpec::uniform();
    const std::vector<Model> h0{uniform};
    const auto u_disc = discretize(uniform, grid_size);
    SineResult out;
    for (int i = 1; i <= i_max; ++i) {
        const auto f = DensitySpec::one_plus_sine(i);
        const std::vector<Model> h1{f};
        const auto f_disc = discretize(f, grid_size);
        out.rows.push_back({i, margin_on(h0, h1, partition), discrete_margin(uniform, f, partition, grid_size),
                            total_variation(uniform, f), total_variation(u_disc, f_disc)});
    }
    const std::vector<FiniteMeasure> a{u_disc};
    const auto b = sine_family(i_max, grid_size);
    out.hull_variation_discrete = hull_variation(a, b).value;
    out.kraft_bound_discrete = 1.0 - out.hull_variation_discrete;
    return out;
}

std::vector<MazurRow> scenario_mazur_mixture(int m_max, std::size_t grid_size) {
    if (m_max < 1) throw ValidationError("mazur scenario: m_max must be >= 1");
    const auto uniform = DensitySpec::uniform();
    const std::vector<FiniteMeasure> a{discretize(uniform, grid_size)};
    const auto family = sine_family(m_max, grid_size);
    std::vector<MazurRow> rows;
    for (int m = 1; m <= m_max; ++m) {
        const auto mix = DensitySpec::cesaro_mixture(m);
        const double tv = total_variation(uniform, mix);
        const std::span<const FiniteMeasure> hull(family.data(), static_cast<std::size_t>(m));
        const double hv = hull_variation(a, hull).value;
        rows.push_back({m, tv, total_variation(a.front(), discretize(mix, grid_size)), 1.0 - tv, hv, 1.0 - hv});
    }
    return rows;
}

KolmogorovResult scenario_kolmogorov_family(const std::vector<double>& u_list, const std::vector<std::size_t>& n_grid,
                                            std::size_t grid_size, const MonteCarlo& mc) {
    const auto uniform = DensitySpec::uniform();
    const auto half = Partition::half_split();
    StreamCounter streams(mc);
    KolmogorovResult out;
    for (double u : u_list) {
        const auto pu = DensitySpec::pu_family(u);
        const std::vector<Model> h0{uniform}, h1{pu};
        const auto report = separation(h0, h1, half);
        const double tv = total_variation(uniform, pu);
        out.rows.push_back({u, ks_distance(pu, uniform), tv, report.margin,
                            discrete_margin(uniform, pu, half, grid_size), 1.0 - tv});
        if (!(report.margin > 0.0)) continue;
        for (std::size_t n : n_grid) {
            const FrequencyTest test(report, half, n);
            const Model m0 = uniform, m1 = pu;
            out.errors.push_back({u, n, exact_error(test, m0, Role::hypothesis), exact_error(test, m1, Role::alternative),
                                  estimate_error(test, m0, Role::hypothesis, mc.replications, streams.next(), mc.workers),
                                  estimate_error(test, m1, Role::alternative, mc.replications, streams.next(),
                                                 mc.workers)});
        }
    }
    return out;
}

PairResult scenario_model_pair(const std::vector<Model>& theta0, const std::vector<Model>& theta1,
                               const Partition& partition, const std::vector<std::size_t>& n_grid,
                               std::size_t grid_size, const MonteCarlo& mc) {
    if (theta0.empty() || theta1.empty()) throw ValidationError("model pair: both sets must be non-empty");
    PairResult out;
    out.separation = separation(theta0, theta1, partition);

    if (theta0.size() == 1 && theta1.size() == 1 && all_densities(theta0) && all_densities(theta1)) {
        out.hull_variation =
            total_variation(std::get<DensitySpec>(theta0.front()), std::get<DensitySpec>(theta1.front()));
    } else {
        const auto a = discretize_all(theta0, grid_size);
        const auto b = discretize_all(theta1, grid_size);
        out.hull_variation = hull_variation(a, b).value;
    }
    out.kraft_bound = 1.0 - out.hull_variation;

    std::vector<FiniteMeasure> v0, v1;
    for (const auto& v : out.separation.v0) v0.emplace_back(v);
    for (const auto& v : out.separation.v1) v1.emplace_back(v);
    out.exponent = error_exponent(v0, v1);

    if (!(out.separation.margin > 0.0)) return out;
    StreamCounter streams(mc);
    std::vector<double> alphas, betas;
    std::vector<std::size_t> exact_n;
    for (std::size_t n : n_grid) {
        const FrequencyTest test(out.separation, partition, n);
        PairErrorRow row{n, kNaN, kNaN, {}, {}};
        try {
            const std::vector<std::size_t> one{n};
            const auto prof = exact_error_profile(out.separation, partition, one);
            row.alpha_exact = prof.alpha.front();
            row.beta_exact = prof.beta.front();
            exact_n.push_back(n);
            alphas.push_back(row.alpha_exact);
            betas.push_back(row.beta_exact);
        } catch (const ResourceError&) {
        }
        std::vector<SimulationReport> a, b;
        for (const auto& m : theta0) {
            a.push_back(estimate_error(test, m, Role::hypothesis, mc.replications, streams.next(), mc.workers));
        }
        for (const auto& m : theta1) {
            b.push_back(estimate_error(test, m, Role::alternative, mc.replications, streams.next(), mc.workers));
        }
        row.alpha_mc = worst(a);
        row.beta_mc = worst(b);
        out.errors.push_back(row);
    }
    if (out.exponent.status == ExponentStatus::finite && !exact_n.empty()) {
        out.onset = onset_from_grid(out.exponent.value, exact_n, alphas, betas);
    }
    return out;
}

SignalResult scenario_signal_detection(const std::vector<std::vector<double>>& theta0,
                                       const std::vector<std::vector<double>>& theta1, std::size_t d,
                                       const std::vector<double>& epsilon_list, const MonteCarlo& mc) {
    if (theta0.empty() || theta1.empty()) throw ValidationError("signal detection: both sets must be non-empty");
    if (d < 1) throw ValidationError("signal detection: dimension must be >= 1");
    std::vector<Vector> s0, s1;
    for (const auto& s : theta0) s0.push_back(padded(s, d));
    for (const auto& s : theta1) s1.push_back(padded(s, d));

    SignalResult out;
    out.margin = separation(s0, s1).margin;
    if (!(out.margin > 0.0)) {
        throw ConstructionError("signal detection: hypothesis and alternative signals are not separated");
    }
    out.half_margin_dimension = 0;
    for (std::size_t m = 1; m <= d; ++m) {
        std::vector<Vector> p0, p1;
        for (const auto& s : s0) p0.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(m));
        for (const auto& s : s1) p1.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(m));
        const double margin = separation(p0, p1).margin;
        out.projection.push_back({m, margin});
        if (out.half_margin_dimension == 0 && margin >= out.margin / 2.0) out.half_margin_dimension = m;
    }

    StreamCounter streams(mc);
    for (double eps : epsilon_list) {
        SignalRow row{eps, 0.0, -1.0, {}, {}};
        for (const auto& a : s0) {
            for (const auto& b : s1) {
                const double dist = euclidean_distance(a, b);
                row.error_exact = std::max(row.error_exact, 2.0 * numeric::normal_cdf(-dist / (2.0 * eps)));
                const auto test = midpoint_test(a, b);
                auto alpha = estimate_error(test, GaussianSequenceModel(a, eps), Role::hypothesis, mc.replications,
                                            streams.next(), mc.workers);
                auto beta = estimate_error(test, GaussianSequenceModel(b, eps), Role::alternative, mc.replications,
                                           streams.next(), mc.workers);
                if (alpha.estimate + beta.estimate > row.error_mc) {
                    row.error_mc = alpha.estimate + beta.estimate;
                    row.alpha_mc = std::move(alpha);
                    row.beta_mc = std::move(beta);
                }
            }
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

TestFamily nested_family(const NestedConfig& config, std::vector<SeparationReport>* reports) {
    if (config.hypothesis.empty()) throw ValidationError("nested scenario: empty hypothesis set");
    if (config.pieces.empty()) throw ValidationError("nested scenario: no alternative pieces");
    if (!config.exponents.empty() && config.exponents.size() != config.pieces.size()) {
        throw ValidationError("nested scenario: need one exponent per piece");
    }
    if (!config.onsets.empty() && config.onsets.size() != config.pieces.size()) {
        throw ValidationError("nested scenario: need one onset per piece");
    }
    TestFamily family;
    for (std::size_t i = 0; i < config.pieces.size(); ++i) {
        const std::string label = "piece" + std::to_string(i + 1);
        const auto report = separation(config.hypothesis, config.pieces[i], config.partition);
        if (!(report.margin > 0.0)) {
            throw ConstructionError("piece '" + label + "' has zero separation margin");
        }
        TestSequence seq = frequency_sequence(report, label);
        if (!config.exponents.empty() || !config.onsets.empty()) {
            const double c = config.exponents.empty() ? seq.exponent() : config.exponents[i];
            const std::size_t n0 = config.onsets.empty() ? seq.onset() : config.onsets[i];
            seq = frequency_sequence(report, label, c, n0);
        }
        family.push_back(family.empty() ? seq : union_schedule(family.back(), seq));
        if (reports) reports->push_back(report);
    }
    return family;
}

NestedResult scenario_nested_alternatives(const NestedConfig& config, const MonteCarlo& mc) {
    std::vector<SeparationReport> reports;
    auto family = nested_family(config, &reports);
    NestedResult out{std::move(reports), interleave(std::move(family), config.n_max), {}, {}};
    const auto& schedule = out.schedule;

    struct Member {
        std::string name;
        Role role;
        std::size_t piece;
        std::vector<double> cells;
    };
    std::vector<Member> members;
    for (std::size_t j = 0; j < config.hypothesis.size(); ++j) {
        members.push_back({"h0[" + std::to_string(j) + "]", Role::hypothesis, 0,
                           induced_vector(config.hypothesis[j], config.partition)});
    }
    for (std::size_t i = 0; i < config.pieces.size(); ++i) {
        for (std::size_t j = 0; j < config.pieces[i].size(); ++j) {
            members.push_back({"piece" + std::to_string(i + 1) + "[" + std::to_string(j) + "]", Role::alternative, i,
                               induced_vector(config.pieces[i][j], config.partition)});
        }
    }

    StreamCounter streams(mc);
    for (const auto& m : members) {
        auto tail = [&](std::size_t k) {
            return m.role == Role::hypothesis ? schedule.alpha_tail(k) : schedule.beta_tail(k, m.piece);
        };
        std::optional<std::size_t> k_star;
        for (std::size_t k = 0; k <= config.n_max; ++k) {
            if (tail(k) < config.tail_level) {
                k_star = k;
                break;
            }
        }
        std::set<std::size_t> grid(config.k_grid.begin(), config.k_grid.end());
        if (grid.empty()) {
            grid.insert(0);
            for (std::size_t k = 1; k <= config.n_max; k *= 2) grid.insert(k);
            grid.insert(config.n_max);
        }
        if (k_star) grid.insert(*k_star);
        std::erase_if(grid, [&](std::size_t k) { return k > config.n_max; });
        const std::vector<std::size_t> ks(grid.begin(), grid.end());

        MemberCurve c{m.name, m.role, m.piece,
                      discernibility_paths(schedule, m.cells, m.role, config.n_max, mc.replications, ks, streams.next(),
                                           mc.workers),
                      {}, k_star, kNaN};
        for (std::size_t idx = 0; idx < ks.size(); ++idx) {
            c.tail.push_back(tail(ks[idx]));
            if (k_star && ks[idx] == *k_star) c.fraction_after_k_star = c.curve.fraction[idx];
        }
        out.curves.push_back(std::move(c));
    }

    for (std::size_t t = 1; t < schedule.covered_families(); ++t) {
        out.chain.push_back({t, schedule.blocks()[t].start, schedule.alpha_tail_after_block(t), schedule.chain_bound(t)});
    }
    return out;
}

double poisson_threshold(double lambda, std::size_t n) {
    if (!(lambda > 0.0)) throw ValidationError("poisson_threshold: lambda must be positive");
    if (n < 1) throw ValidationError("poisson_threshold: n must be >= 1");
    const double target = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    double hi = lambda * (1.0 - 1e-12);
    if (poisson_atom_tail_bound(lambda, n, hi) > target) return lambda;
    double lo = lambda * 1e-12;
    if (poisson_atom_tail_bound(lambda, n, lo) <= target) return lo;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * lambda; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (poisson_atom_tail_bound(lambda, n, mid) <= target) hi = mid;
        else lo = mid;
    }
    return hi;
}

PoissonResult scenario_poisson(const PoissonModel& h0, const PoissonModel& h1, const std::vector<std::size_t>& n_grid,
                               const MonteCarlo& mc) {
    if (h0.shape.size() != h1.shape.size()) throw ValidationError("poisson scenario: shapes differ in size");
    if (h0.lambda == h1.lambda && h0.shape == h1.shape) {
        throw DegenerateError("poisson scenario: hypothesis and alternative mean measures coincide");
    }
    const std::size_t k = h0.shape.size();
    const auto cells = Partition::identity(k);
    const Vector shape0(h0.shape.weights().begin(), h0.shape.weights().end());
    const Vector shape1(h1.shape.weights().begin(), h1.shape.weights().end());
    const auto report = separation({shape0}, {shape1});
    const bool shapes_differ = report.margin > 0.0;

    PoissonResult out{report.margin, {}};
    StreamCounter streams(mc);
    for (std::size_t n : n_grid) {
        const double nd = static_cast<double>(n);
        const double x = poisson_threshold(h0.lambda, n);
        const double centre = nd * h0.lambda;
        const double band = nd * x;
        auto count_rejects = [&](std::uint64_t count) { return std::abs(static_cast<double>(count) - centre) > band; };
        auto rejects = [&](std::span<const std::size_t> atoms) {
            if (count_rejects(atoms.size())) return true;
            if (!shapes_differ || atoms.empty()) return false;
            std::vector<std::uint64_t> counts(k, 0);
            for (auto a : atoms) ++counts[a];
            return nearest_set_rejects(report.v0, report.v1, counts);
        };

        PoissonRow row{n, x, x < h0.lambda ? poisson_atom_tail_bound(h0.lambda, n, x) : kNaN, kNaN, kNaN, {}, {}, {}};

        // Exact errors: Poisson mixture over N of the conditional frequency test.
        const double top_mean = nd * std::max(h0.lambda, h1.lambda);
        const auto n_top = static_cast<std::uint64_t>(std::ceil(top_mean + 40.0 * std::sqrt(top_mean) + 40.0));
        double work = 0.0;
        for (std::uint64_t c = 0; c <= n_top && shapes_differ; ++c) {
            if (!count_rejects(c)) work += composition_count(c, k);
        }
        if (work <= kEnumerationBudget) {
            std::vector<double> a_terms, b_terms;
            for (std::uint64_t c = 0; c <= n_top; ++c) {
                const double p0 = std::exp(log_poisson_pmf(c, centre));
                const double p1 = std::exp(log_poisson_pmf(c, nd * h1.lambda));
                if (count_rejects(c)) {
                    a_terms.push_back(p0);
                    continue;
                }
                double a_cond = 0.0, b_cond = 1.0;
                if (shapes_differ && c > 0) {
                    const FrequencyTest test(report, cells, c);
                    a_cond = exact_error(test, shape0, Role::hypothesis);
                    b_cond = exact_error(test, shape1, Role::alternative);
                }
                a_terms.push_back(p0 * a_cond);
                b_terms.push_back(p1 * b_cond);
            }
            row.alpha_exact = std::min(1.0, numeric::pairwise_sum(a_terms));
            row.beta_exact = std::min(1.0, numeric::pairwise_sum(b_terms));
        }

        row.alpha_mc = estimate_probability(
            [&](Rng& g) { return rejects(sample_poisson_process(h0, n, g)); }, mc.replications, streams.next(),
            mc.workers);
        row.beta_mc = estimate_probability(
            [&](Rng& g) { return !rejects(sample_poisson_process(h1, n, g)); }, mc.replications, streams.next(),
            mc.workers);
        row.count_tail_mc = estimate_probability([&](Rng& g) { return count_rejects(g.poisson(centre)); },
                                                 mc.replications, streams.next(), mc.workers);
        row.alpha_mc.test_label = row.beta_mc.test_label = "count+frequency";
        row.count_tail_mc.test_label = "count";
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace clab
