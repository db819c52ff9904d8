#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "clab/measures.hpp"

namespace clab {

/// Half the L1 distance between probability vectors.
double total_variation(const FiniteMeasure& p, const FiniteMeasure& q);

/// Half the L1 distance between two densities on (0,1). The difference is
/// split at its sign changes and integrated through the closed-form CDFs.
double total_variation(const DensitySpec& p, const DensitySpec& q);

/// Closest pair of mixtures between the convex hulls of two finite sets.
struct HullDistanceResult {
    double value = 0.0;
    std::vector<double> mixture_p;  // convex weights over the first set
    std::vector<double> mixture_q;  // convex weights over the second set
    std::size_t lp_iterations = 0;
};

/// min over convex weights of total_variation(sum lambda_i P_i, sum mu_j Q_j).
/// Solved through its dual, max over f in [0,1]^k of min_i f.P_i - max_j f.Q_j,
/// whose row multipliers are the optimal weights.
HullDistanceResult hull_variation(std::span<const FiniteMeasure> a, std::span<const FiniteMeasure> b);

/// Lower bound 1 - var([A],[B]) on alpha + beta for any single-observation test.
double kraft_bound(std::span<const FiniteMeasure> a, std::span<const FiniteMeasure> b);

/// Randomized single-observation test: reject with probability reject_prob[j]
/// when atom j is observed.
class RandomizedTest {
public:
    explicit RandomizedTest(std::vector<double> reject_prob);

    std::span<const double> reject_prob() const noexcept { return reject_prob_; }
    /// Probability of rejecting when the observation is drawn from `p`.
    double alpha(const FiniteMeasure& p) const;
    /// Probability of accepting when the observation is drawn from `q`.
    double beta(const FiniteMeasure& q) const;

private:
    std::vector<double> reject_prob_;
};

struct OptimalTest {
    RandomizedTest test;
    FiniteMeasure closest_p;
    FiniteMeasure closest_q;
    HullDistanceResult hull;
};

/// Likelihood-ratio test between the closest hull mixtures: reject where
/// q* > p*, accept where q* < p*, reject with probability 1/2 on ties.
OptimalTest optimal_test(std::span<const FiniteMeasure> a, std::span<const FiniteMeasure> b);

/// Mixture sum_i w_i P_i.
FiniteMeasure mixture(std::span<const FiniteMeasure> set, std::span<const double> weights);

/// sup_x |F_1(x) - F_2(x)| for two named densities.
double ks_distance(const DensitySpec& a, const DensitySpec& b);

}  // namespace clab
