#pragma once

// Ready-made experiments: each function runs one named construction end to
// end and returns typed results. Serialization lives in report.hpp.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clab/distances.hpp"
#include "clab/measures.hpp"
#include "clab/partition_tests.hpp"
#include "clab/scheduler.hpp"
#include "clab/simulation.hpp"

namespace clab {

/// Replication budget and RNG shared by the Monte Carlo parts of a scenario.
struct MonteCarlo {
    std::uint64_t replications = 10000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

/// Maps each grid cell of a `grid_size` discretization to the cell of
/// `partition` containing its midpoint.
Partition grid_partition(const Partition& partition, std::size_t grid_size);

// --- sine densities ---------------------------------------------------------

struct SineRow {
    int frequency;
    double margin_exact;     // sup-norm margin of uniform vs f_i on the partition
    double margin_discrete;  // same on the discretized measures
    double tv_exact;
    double tv_discrete;
};

struct SineResult {
    std::vector<SineRow> rows;
    double hull_variation_discrete;  // uniform vs hull of f_1..f_imax, discretized
    double kraft_bound_discrete;
};

SineResult scenario_sine_indistinguishable(int i_max, std::size_t grid_size, const Partition& partition);

// --- Cesaro mixtures ----------------------------------------------------------

struct MazurRow {
    int order;
    double tv_exact;  // TV(uniform, (f_1 + ... + f_m)/m)
    double tv_discrete;
    double kraft_exact;              // 1 - tv_exact
    double hull_variation_discrete;  // uniform vs hull of f_1..f_m
    double hull_kraft_discrete;
};

std::vector<MazurRow> scenario_mazur_mixture(int m_max, std::size_t grid_size);

// --- P_u family ---------------------------------------------------------------

struct KolmogorovRow {
    double u;
    double ks;
    double tv;
    double margin;           // half-split margin, u/2
    double margin_discrete;  // same on the discretized measures
    double kraft;            // 1 - tv
};

struct KolmogorovErrorRow {
    double u;
    std::size_t n;
    double alpha_exact;
    double beta_exact;
    SimulationReport alpha_mc;
    SimulationReport beta_mc;
};

struct KolmogorovResult {
    std::vector<KolmogorovRow> rows;
    std::vector<KolmogorovErrorRow> errors;  // u = 0 has no test and no rows here
};

KolmogorovResult scenario_kolmogorov_family(const std::vector<double>& u_list, const std::vector<std::size_t>& n_grid,
                                            std::size_t grid_size, const MonteCarlo& mc);

// --- generic pair of model sets ------------------------------------------------

struct PairErrorRow {
    std::size_t n;
    double alpha_exact;  // NaN when enumeration exceeds its budget
    double beta_exact;
    SimulationReport alpha_mc;  // worst member
    SimulationReport beta_mc;
};

struct PairResult {
    SeparationReport separation;
    double hull_variation;
    double kraft_bound;
    ChernoffExponent exponent;  // on the induced vectors
    std::optional<std::size_t> onset;
    std::vector<PairErrorRow> errors;  // empty when the margin is zero
};

/// Separation, Kraft bound and error curves for arbitrary model sets on a
/// partition. Densities are discretized with `grid_size` for the hull LP.
PairResult scenario_model_pair(const std::vector<Model>& theta0, const std::vector<Model>& theta1,
                               const Partition& partition, const std::vector<std::size_t>& n_grid,
                               std::size_t grid_size, const MonteCarlo& mc);

// --- Gaussian sequence model -----------------------------------------------------

struct SignalRow {
    double epsilon;
    double error_exact;  // max over pairs of 2 Phi(-|s1 - s0| / (2 eps))
    double error_mc;     // max over pairs of estimated alpha + beta
    SimulationReport alpha_mc;  // of the pair attaining error_mc
    SimulationReport beta_mc;
};

struct ProjectionRow {
    std::size_t m;
    double margin;  // sup-norm margin of the first m coordinates
};

struct SignalResult {
    double margin;
    std::vector<SignalRow> rows;
    std::vector<ProjectionRow> projection;
    std::size_t half_margin_dimension;  // smallest m with margin_m >= margin / 2
};

/// Signals shorter than d are padded with zeros. Throws ConstructionError
/// when the sets are not separated.
SignalResult scenario_signal_detection(const std::vector<std::vector<double>>& theta0,
                                       const std::vector<std::vector<double>>& theta1, std::size_t d,
                                       const std::vector<double>& epsilon_list, const MonteCarlo& mc);

// --- nested alternatives and the interleaved schedule ------------------------------

struct NestedConfig {
    std::vector<Model> hypothesis;
    std::vector<std::vector<Model>> pieces;  // Theta'_{1i}; family i tests the union of pieces 1..i
    Partition partition;
    std::vector<double> exponents;   // optional per-piece override of the certified exponent
    std::vector<std::size_t> onsets;  // optional per-piece override of the certified onset
    std::size_t n_max = 2048;
    std::vector<std::size_t> k_grid;
    double tail_level = 0.01;
};

struct MemberCurve {
    std::string member;
    Role role;
    std::size_t piece;  // 0-based; 0 for hypothesis members
    DiscernibilityCurve curve;
    std::vector<double> tail;  // clamped certified tail bound at each k of the curve
    std::optional<std::size_t> k_star;  // first k with tail < tail_level
    double fraction_after_k_star;  // NaN without k_star
};

struct ChainRow {
    std::size_t block;
    std::size_t start;
    double tail;   // unclamped certified alpha tail from the block start
    double chain;  // max alpha scale times sum of i^-2 from the block on
};

struct NestedResult {
    std::vector<SeparationReport> pieces;
    TestSchedule schedule;
    std::vector<MemberCurve> curves;
    std::vector<ChainRow> chain;
};

/// Throws ConstructionError naming the first piece with zero margin.
NestedResult scenario_nested_alternatives(const NestedConfig& config, const MonteCarlo& mc);

/// Family of nested union tests for the pieces, without running anything.
TestFamily nested_family(const NestedConfig& config, std::vector<SeparationReport>* reports = nullptr);

// --- Poisson processes -----------------------------------------------------------------

struct PoissonRow {
    std::size_t n;
    double threshold;     // x_n, the count test rejects when |N - n lambda0| > n x_n
    double count_bound;   // atom-count tail bound at x_n
    double alpha_exact;
    double beta_exact;
    SimulationReport alpha_mc;
    SimulationReport beta_mc;
    SimulationReport count_tail_mc;  // P0(|N - n lambda0| > n x_n)
};

struct PoissonResult {
    double shape_margin;
    std::vector<PoissonRow> rows;
};

/// Smallest x in (0, lambda) with poisson_atom_tail_bound(lambda, n, x) <= n^-2,
/// or lambda when no such x exists.
double poisson_threshold(double lambda, std::size_t n);

/// Count test followed by the nearest-shape test on the atom counts.
/// Throws DegenerateError when both mean measures coincide.
PoissonResult scenario_poisson(const PoissonModel& h0, const PoissonModel& h1, const std::vector<std::size_t>& n_grid,
                               const MonteCarlo& mc);

}  // namespace clab
