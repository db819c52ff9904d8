#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

namespace clab::numeric {

/// Adaptive Simpson quadrature to absolute tolerance `abs_tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-10, int max_depth = 48);

struct Minimum {
    double argmin;
    double value;
};

/// Golden-section search for the minimum of a unimodal function on [lo, hi].
/// Only interior points are evaluated.
Minimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                double x_tol = 1e-10);

/// Pairwise summation; result depends only on the order of `values`.
double pairwise_sum(std::span<const double> values);

/// Standard normal CDF.
double normal_cdf(double z);

/// Least-squares slope of y against x.
double ols_slope(std::span<const double> x, std::span<const double> y);

/// Formats with 17 significant digits ("%.17g").
std::string format_double(double value);

}  // namespace clab::numeric
