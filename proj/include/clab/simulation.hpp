#pragma once

// Seeded sampling and Monte Carlo estimation.
//
// Every replication r draws from its own generator derived from
// (seed, stream, r), so results do not depend on the number of workers or on
// the order in which workers finish.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "clab/distances.hpp"
#include "clab/measures.hpp"
#include "clab/partition_tests.hpp"
#include "clab/scheduler.hpp"

namespace clab {

struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// xoshiro256** seeded through splitmix64. Only integer arithmetic feeds the
/// state, so streams are identical on every platform.
class Rng {
public:
    explicit Rng(RngSpec spec);
    /// Independent generator for replication `index` of `spec`.
    static Rng for_replication(RngSpec spec, std::uint64_t index);

    std::uint64_t next_u64();
    /// Uniform on [0,1) with 53 random bits.
    double uniform();
    /// Uniform on (0,1).
    double uniform_open();
    double normal();
    std::uint64_t poisson(double mean);

private:
    std::array<std::uint64_t, 4> state_{};
};

/// Inverse-CDF sampler over a fixed probability vector.
class DiscreteSampler {
public:
    explicit DiscreteSampler(std::span<const double> probs);
    std::size_t operator()(Rng& rng) const;

private:
    std::vector<double> cumulative_;
};

std::vector<std::size_t> sample_iid(const FiniteMeasure& p, std::size_t n, Rng& rng);
std::vector<double> sample_iid(const DensitySpec& spec, std::size_t n, Rng& rng);

struct PoissonModel {
    PoissonModel(double lambda, FiniteMeasure shape);

    double lambda;        // total mass P(Omega)
    FiniteMeasure shape;  // P / P(Omega)
};

/// N ~ Poisson(n lambda) atoms, then N i.i.d. draws from the shape.
/// Throws ResourceError when n lambda > 1e9.
std::vector<std::size_t> sample_poisson_process(const PoissonModel& model, std::size_t n, Rng& rng);

/// exp{-n(l+x)log(1+x/l) + nx} + exp{-n(l-x)log(1-x/l) - nx}, a bound on
/// P(|N_n - n l| > n x) for the atom count of n superposed realizations.
double poisson_atom_tail_bound(double lambda, std::size_t n, double x);

struct GaussianSequenceModel {
    GaussianSequenceModel(std::vector<double> signal, double epsilon);

    std::vector<double> signal;
    double epsilon;
    std::size_t dimension() const noexcept { return signal.size(); }
};

/// y_j = s_j + epsilon xi_j with xi_j standard normal.
std::vector<double> sample_gaussian_sequence(const GaussianSequenceModel& model, Rng& rng);

/// Rejects iff sum_j f_j (y_j - center_j) > threshold.
struct LinearFunctionalTest {
    std::vector<double> functional;
    std::vector<double> center;
    double threshold;

    bool rejects(std::span<const double> y) const;
};

/// The midpoint test for the pair (s0, s1): f = s1 - s0, threshold |f|^2 / 2.
LinearFunctionalTest midpoint_test(std::span<const double> s0, std::span<const double> s1);

struct SimulationReport {
    double estimate = 0.0;
    std::uint64_t events = 0;
    std::uint64_t replications = 0;
    double half_width_95 = 0.0;  // 1.96 sqrt(p(1-p)/R)
    double ci_low = 0.0;
    double ci_high = 0.0;  // Wilson interval when estimate < 5/R
    std::string model_label;
    std::string test_label;
    std::uint64_t seed = 0;
};

SimulationReport make_report(std::uint64_t events, std::uint64_t replications, std::uint64_t seed,
                             std::string model_label = {}, std::string test_label = {});

/// Runs body(r) for r in [0, count) on `workers` threads. The first exception
/// thrown by any worker is rethrown after all workers stop.
void parallel_for(std::uint64_t count, unsigned workers, const std::function<void(std::uint64_t)>& body);

/// Fraction of replications on which `event` happens.
SimulationReport estimate_probability(const std::function<bool(Rng&)>& event, std::uint64_t replications,
                                      RngSpec rng, unsigned workers);

/// Monte Carlo estimate of the error made in `role`.
SimulationReport estimate_error(const FrequencyTest& test, const Model& model, Role role,
                                std::uint64_t replications, RngSpec rng, unsigned workers = 1);
SimulationReport estimate_error(const RandomizedTest& test, const FiniteMeasure& model, Role role,
                                std::uint64_t replications, RngSpec rng, unsigned workers = 1);
SimulationReport estimate_error(const LinearFunctionalTest& test, const GaussianSequenceModel& model, Role role,
                                std::uint64_t replications, RngSpec rng, unsigned workers = 1);

struct DiscernibilityCurve {
    std::vector<std::size_t> k;
    std::vector<double> fraction;           // paths erring at some n in (k, n_max]
    std::vector<std::uint64_t> erring_paths;
    std::uint64_t replications = 0;
    std::size_t n_max = 0;
};

/// Grows each sample path one observation at a time and evaluates the
/// scheduled test on every prefix. `cell_probs` is the law of the cell index
/// of one observation under the simulated member.
DiscernibilityCurve discernibility_paths(const TestSchedule& schedule, std::span<const double> cell_probs,
                                         Role role, std::size_t n_max, std::uint64_t replications,
                                         std::span<const std::size_t> k_grid, RngSpec rng,
                                         unsigned workers = 1);

}  // namespace clab
