#include "clab/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "clab/errors.hpp"
#include "clab/numeric.hpp"

namespace clab {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Knuth's multiplication method; fine for small means.
std::uint64_t poisson_small(Rng& rng, double mean) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = rng.uniform_open();
    while (prod > limit) {
        ++k;
        prod *= rng.uniform_open();
    }
    return k;
}

// Hormann's transformed rejection with squeeze (PTRS), for mean >= 10.
std::uint64_t poisson_ptrs(Rng& rng, double mean) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform_open();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

std::string join_vector(std::span<const double> v) {
    std::string out;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (j) out += ",";
        out += numeric::format_double(v[j]);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Rng

Rng::Rng(RngSpec spec) {
    std::uint64_t x = spec.seed;
    std::uint64_t mix = splitmix64(x) ^ (spec.stream * 0xD1B54A32D192ED03ULL);
    for (auto& s : state_) s = splitmix64(mix);
}

Rng Rng::for_replication(RngSpec spec, std::uint64_t index) {
    std::uint64_t x = spec.stream;
    const std::uint64_t a = splitmix64(x);
    x = index ^ a;
    const std::uint64_t b = splitmix64(x);
    return Rng(RngSpec{spec.seed, a ^ rotl(b, 17)});
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform_open() { return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52; }

double Rng::normal() {
    // Box-Muller, one variate per call.
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw ValidationError("poisson: mean must be finite and nonnegative");
    }
    if (mean == 0.0) return 0;
    return mean < 10.0 ? poisson_small(*this, mean) : poisson_ptrs(*this, mean);
}

DiscreteSampler::DiscreteSampler(std::span<const double> probs) {
    if (probs.empty()) throw ValidationError("sampler: empty probability vector");
    double acc = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw ValidationError("sampler: negative probability");
        acc += p;
        cumulative_.push_back(acc);
    }
    if (!(acc > 0.0)) throw ValidationError("sampler: probabilities sum to zero");
}

std::size_t DiscreteSampler::operator()(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    auto idx = static_cast<std::size_t>(it - cumulative_.begin());
    if (idx >= cumulative_.size()) idx = cumulative_.size() - 1;
    // never return a zero-probability atom
    while (idx > 0 && cumulative_[idx] == cumulative_[idx - 1]) --idx;
    return idx;
}

// ---------------------------------------------------------------------------
// Samplers

std::vector<std::size_t> sample_iid(const FiniteMeasure& p, std::size_t n, Rng& rng) {
    if (n < 1) throw ValidationError("sample_iid: n must be >= 1");
    DiscreteSampler sampler(p.weights());
    std::vector<std::size_t> out(n);
    for (auto& x : out) x = sampler(rng);
    return out;
}

std::vector<double> sample_iid(const DensitySpec& spec, std::size_t n, Rng& rng) {
    if (n < 1) throw ValidationError("sample_iid: n must be >= 1");
    std::vector<double> out(n);
    for (auto& x : out) x = spec.quantile(rng.uniform_open());
    return out;
}

PoissonModel::PoissonModel(double lambda_, FiniteMeasure shape_) : lambda(lambda_), shape(std::move(shape_)) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("Poisson model: total mass must be positive and finite");
    }
}

std::vector<std::size_t> sample_poisson_process(const PoissonModel& model, std::size_t n, Rng& rng) {
    if (n < 1) throw ValidationError("sample_poisson_process: n must be >= 1");
    const double mean = static_cast<double>(n) * model.lambda;
    if (mean > 1e9) {
        throw ResourceError("sample_poisson_process: expected atom count n*lambda exceeds 1e9");
    }
    const std::uint64_t count = rng.poisson(mean);
    std::vector<std::size_t> atoms(count);
    DiscreteSampler sampler(model.shape.weights());
    for (auto& a : atoms) a = sampler(rng);
    return atoms;
}

double poisson_atom_tail_bound(double lambda, std::size_t n, double x) {
    if (!(lambda > 0.0)) throw ValidationError("poisson_atom_tail_bound: lambda must be positive");
    if (!(x > 0.0 && x < lambda)) {
        throw ValidationError("poisson_atom_tail_bound: need 0 < x < lambda");
    }
    const double nn = static_cast<double>(n);
    const double upper = -nn * (lambda + x) * std::log1p(x / lambda) + nn * x;
    const double lower = -nn * (lambda - x) * std::log1p(-x / lambda) - nn * x;
    return std::exp(upper) + std::exp(lower);
}

GaussianSequenceModel::GaussianSequenceModel(std::vector<double> signal_, double epsilon_)
    : signal(std::move(signal_)), epsilon(epsilon_) {
    if (signal.empty()) throw ValidationError("Gaussian sequence model: dimension must be >= 1");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ValidationError("Gaussian sequence model: noise level must be positive and finite");
    }
    for (double s : signal) {
        if (!std::isfinite(s)) throw ValidationError("Gaussian sequence model: non-finite coordinate");
    }
}

std::vector<double> sample_gaussian_sequence(const GaussianSequenceModel& model, Rng& rng) {
    std::vector<double> y(model.dimension());
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = model.signal[j] + model.epsilon * rng.normal();
    return y;
}

bool LinearFunctionalTest::rejects(std::span<const double> y) const {
    if (y.size() != functional.size() || y.size() != center.size()) {
        throw ValidationError("linear test: observation dimension mismatch");
    }
    double t = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) t += functional[j] * (y[j] - center[j]);
    return t > threshold;
}

LinearFunctionalTest midpoint_test(std::span<const double> s0, std::span<const double> s1) {
    if (s0.size() != s1.size()) throw ValidationError("midpoint_test: dimension mismatch");
    LinearFunctionalTest t;
    t.functional.resize(s0.size());
    double norm2 = 0.0;
    for (std::size_t j = 0; j < s0.size(); ++j) {
        t.functional[j] = s1[j] - s0[j];
        norm2 += t.functional[j] * t.functional[j];
    }
    if (norm2 == 0.0) throw ConstructionError("midpoint_test: signals coincide");
    t.center.assign(s0.begin(), s0.end());
    t.threshold = norm2 / 2.0;
    return t;
}

// ---------------------------------------------------------------------------
// Estimation

SimulationReport make_report(std::uint64_t events, std::uint64_t replications, std::uint64_t seed,
                             std::string model_label, std::string test_label) {
    if (replications == 0) throw ValidationError("report: zero replications");
    SimulationReport r;
    r.events = events;
    r.replications = replications;
    r.seed = seed;
    r.model_label = std::move(model_label);
    r.test_label = std::move(test_label);
    const double reps = static_cast<double>(replications);
    const double p = static_cast<double>(events) / reps;
    r.estimate = p;
    r.half_width_95 = 1.96 * std::sqrt(p * (1.0 - p) / reps);
    if (p < 5.0 / reps) {
        // Wilson score interval
        const double z2 = 1.96 * 1.96;
        const double denom = 1.0 + z2 / reps;
        const double centre = (p + z2 / (2.0 * reps)) / denom;
        const double half = 1.96 * std::sqrt(p * (1.0 - p) / reps + z2 / (4.0 * reps * reps)) / denom;
        r.ci_low = std::max(0.0, centre - half);
        r.ci_high = std::min(1.0, centre + half);
    } else {
        r.ci_low = std::max(0.0, p - r.half_width_95);
        r.ci_high = std::min(1.0, p + r.half_width_95);
    }
    return r;
}

void parallel_for(std::uint64_t count, unsigned workers, const std::function<void(std::uint64_t)>& body) {
    workers = std::max(1u, workers);
    if (workers == 1 || count < 2) {
        for (std::uint64_t r = 0; r < count; ++r) body(r);
        return;
    }
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    const std::uint64_t w = std::min<std::uint64_t>(workers, count);
    for (std::uint64_t t = 0; t < w; ++t) {
        threads.emplace_back([&, t] {
            try {
                // Contiguous slice per worker.
                const std::uint64_t lo = count * t / w;
                const std::uint64_t hi = count * (t + 1) / w;
                for (std::uint64_t r = lo; r < hi && !failed.load(std::memory_order_relaxed); ++r) body(r);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        });
    }
    for (auto& th : threads) th.join();
    if (error) std::rethrow_exception(error);
}

SimulationReport estimate_probability(const std::function<bool(Rng&)>& event, std::uint64_t replications,
                                      RngSpec spec, unsigned workers) {
    if (replications < 1) throw ValidationError("estimate: replications must be >= 1");
    std::vector<std::uint8_t> hit(replications, 0);
    parallel_for(replications, workers, [&](std::uint64_t r) {
        Rng rng = Rng::for_replication(spec, r);
        hit[r] = event(rng) ? 1 : 0;
    });
    std::uint64_t events = 0;
    for (auto h : hit) events += h;
    return make_report(events, replications, spec.seed);
}

namespace {

void check_estimation_budget(std::uint64_t replications) {
    if (replications < 100) {
        throw ValidationError("estimate_error: at least 100 replications are required");
    }
}

}  // namespace

SimulationReport estimate_error(const FrequencyTest& test, const Model& model, Role role,
                                std::uint64_t replications, RngSpec rng, unsigned workers) {
    check_estimation_budget(replications);
    const auto cell_probs = induced_vector(model, test.partition());
    DiscreteSampler sampler(cell_probs);
    const std::size_t n = test.sample_size();
    auto report = estimate_probability(
        [&](Rng& g) {
            std::vector<std::uint64_t> counts(cell_probs.size(), 0);
            for (std::size_t i = 0; i < n; ++i) ++counts[sampler(g)];
            const bool reject = test.rejects(counts);
            return role == Role::hypothesis ? reject : !reject;
        },
        replications, rng, workers);
    report.model_label = model_label(model);
    report.test_label = "frequency(n=" + std::to_string(n) + ", " + test.partition().label() + ")";
    return report;
}

SimulationReport estimate_error(const RandomizedTest& test, const FiniteMeasure& model, Role role,
                                std::uint64_t replications, RngSpec rng, unsigned workers) {
    check_estimation_budget(replications);
    DiscreteSampler sampler(model.weights());
    auto report = estimate_probability(
        [&](Rng& g) {
            const std::size_t atom = sampler(g);
            const bool reject = g.uniform() < test.reject_prob()[atom];
            return role == Role::hypothesis ? reject : !reject;
        },
        replications, rng, workers);
    report.model_label = model_label(model);
    report.test_label = "randomized(" + join_vector(test.reject_prob()) + ")";
    return report;
}

SimulationReport estimate_error(const LinearFunctionalTest& test, const GaussianSequenceModel& model, Role role,
                                std::uint64_t replications, RngSpec rng, unsigned workers) {
    check_estimation_budget(replications);
    auto report = estimate_probability(
        [&](Rng& g) {
            const auto y = sample_gaussian_sequence(model, g);
            const bool reject = test.rejects(y);
            return role == Role::hypothesis ? reject : !reject;
        },
        replications, rng, workers);
    report.model_label = "gaussian_sequence(d=" + std::to_string(model.dimension()) +
                         ", eps=" + numeric::format_double(model.epsilon) + ")";
    report.test_label = "linear(threshold=" + numeric::format_double(test.threshold) + ")";
    return report;
}

DiscernibilityCurve discernibility_paths(const TestSchedule& schedule, std::span<const double> cell_probs,
                                         Role role, std::size_t n_max, std::uint64_t replications,
                                         std::span<const std::size_t> k_grid, RngSpec rng, unsigned workers) {
    if (n_max > schedule.n_max()) {
        throw ValidationError("discernibility_paths: schedule is not defined through n_max");
    }
    if (replications < 1) throw ValidationError("discernibility_paths: replications must be >= 1");
    DiscreteSampler sampler(cell_probs);
    std::vector<std::size_t> last_error(replications, 0);
    parallel_for(replications, workers, [&](std::uint64_t r) {
        Rng g = Rng::for_replication(rng, r);
        std::vector<std::uint64_t> counts(cell_probs.size(), 0);
        std::size_t last = 0;
        for (std::size_t n = 1; n <= n_max; ++n) {
            ++counts[sampler(g)];
            const bool reject = schedule.rejects(n, counts);
            if (role == Role::hypothesis ? reject : !reject) last = n;
        }
        last_error[r] = last;
    });

    DiscernibilityCurve curve;
    curve.replications = replications;
    curve.n_max = n_max;
    for (std::size_t k : k_grid) {
        std::uint64_t erring = 0;
        for (std::size_t last : last_error) {
            if (last > k) ++erring;
        }
        curve.k.push_back(k);
        curve.erring_paths.push_back(erring);
        curve.fraction.push_back(static_cast<double>(erring) / static_cast<double>(replications));
    }
    return curve;
}

}  // namespace clab
