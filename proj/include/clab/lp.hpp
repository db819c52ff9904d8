#pragma once

// Dense two-phase simplex for the small linear programs behind the hull
// distance. Variables may carry finite upper bounds, which are handled by
// complementing instead of extra rows.

#include <cstddef>
#include <limits>
#include <vector>

namespace clab::lp {

enum class Sense { less_equal, greater_equal, equal };

struct Constraint {
    std::vector<double> coefficients;
    Sense sense;
    double rhs;
};

inline constexpr double kNoBound = std::numeric_limits<double>::infinity();

/// minimize objective . x  subject to constraints, 0 <= x <= upper.
/// An empty `upper` means no upper bounds.
struct Problem {
    std::vector<double> objective;
    std::vector<Constraint> constraints;
    std::vector<double> upper;
};

enum class Status { optimal, infeasible, unbounded };

struct Solution {
    Status status = Status::infeasible;
    std::vector<double> x;
    /// d(optimal objective) / d(rhs) for each constraint; empty for rows
    /// dropped as redundant in phase 1.
    std::vector<double> duals;
    double objective = 0.0;
    std::size_t iterations = 0;
};

struct Options {
    double tolerance = 1e-9;
    std::size_t max_iterations = 100000;
};

/// Dantzig's rule, switching to Bland's rule after a run of degenerate
/// pivots. Throws NumericError when the iteration cap is hit.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace clab::lp
