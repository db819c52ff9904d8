#pragma once

// Probability measures on a finite alphabet and on the unit interval, plus the
// partitions that reduce either of them to a probability vector.

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace clab {

inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kQuadratureTolerance = 1e-9;

/// Probability vector on {0, ..., k-1}. Immutable once constructed.
class FiniteMeasure {
public:
    /// Validates nonnegativity and that the weights sum to one within `tol`.
    explicit FiniteMeasure(std::vector<double> weights, double tol = kExactTolerance);

    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t j) const { return weights_[j]; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Convex combination lambda*this + (1-lambda)*other.
    FiniteMeasure mix(const FiniteMeasure& other, double lambda) const;

    friend bool operator==(const FiniteMeasure&, const FiniteMeasure&) = default;

private:
    std::vector<double> weights_;
};

/// Divides a nonnegative vector by its sum.
FiniteMeasure normalize(std::span<const double> weights);

enum class DensityKind { uniform, one_plus_sine, cesaro_mixture, pu_family };

/// One of the named densities on (0,1).
///
///   uniform             f(x) = 1
///   one_plus_sine(i)    f(x) = 1 + sin(2 pi i x)
///   cesaro_mixture(m)   f(x) = 1 + (1/m) sum_{j<=m} sin(2 pi j x)
///   pu_family(u)        f(x) = 1 - u on (0,1/2], 1 + u on (1/2,1)
class DensitySpec {
public:
    static DensitySpec uniform();
    static DensitySpec one_plus_sine(int frequency);
    static DensitySpec cesaro_mixture(int order);
    static DensitySpec pu_family(double u);

    DensityKind kind() const noexcept { return kind_; }
    /// Frequency for one_plus_sine, order for cesaro_mixture, 0 otherwise.
    int index() const noexcept { return index_; }
    double u() const noexcept { return u_; }

    double density(double x) const;
    double cdf(double x) const;
    /// Inverse CDF; exact for piecewise-linear CDFs, bracketed Newton otherwise.
    double quantile(double p) const;
    /// Highest sine frequency present; drives grid resolution in numeric routines.
    int max_frequency() const noexcept;
    /// Points in (0,1) where the density is discontinuous.
    std::vector<double> breakpoints() const;

    std::string label() const;

    friend bool operator==(const DensitySpec&, const DensitySpec&) = default;

private:
    DensitySpec(DensityKind kind, int index, double u) : kind_(kind), index_(index), u_(u) {}

    DensityKind kind_;
    int index_;
    double u_;
};

using Model = std::variant<FiniteMeasure, DensitySpec>;

std::string model_label(const Model& model);

/// Cells of either a finite alphabet (lists of atom indices) or of (0,1)
/// (consecutive intervals given by their breakpoints).
class Partition {
public:
    enum class Base { alphabet, interval };

    /// Every atom in its own cell.
    static Partition identity(std::size_t alphabet_size);
    static Partition atoms(std::vector<std::vector<std::size_t>> cells, std::size_t alphabet_size);
    /// Breakpoints 0 = b_0 < b_1 < ... < b_k = 1; cell j is (b_j, b_{j+1}].
    static Partition intervals(std::vector<double> breakpoints);
    static Partition equal_intervals(std::size_t cells);
    static Partition half_split() { return equal_intervals(2); }

    Base base() const noexcept { return base_; }
    std::size_t size() const noexcept;
    std::size_t alphabet_size() const noexcept { return alphabet_size_; }
    const std::vector<std::vector<std::size_t>>& atom_cells() const noexcept { return atom_cells_; }
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    /// Cell index of an atom; alphabet partitions only.
    std::size_t cell_of_atom(std::size_t atom) const { return cell_of_atom_.at(atom); }
    /// Cell index of a point of (0,1); interval partitions only.
    std::size_t cell_of_point(double x) const;

    std::string label() const;

private:
    Partition() = default;

    Base base_ = Base::alphabet;
    std::size_t alphabet_size_ = 0;
    std::vector<std::vector<std::size_t>> atom_cells_;
    std::vector<std::size_t> cell_of_atom_;
    std::vector<double> breakpoints_;
};

/// P(A_1), ..., P(A_k).
std::vector<double> induced_vector(const Model& model, const Partition& partition);

/// Mass of each of `grid_size` equal-width subintervals.
FiniteMeasure discretize(const DensitySpec& spec, std::size_t grid_size);

/// Adaptive Simpson quadrature of the density over [a, b].
double integrate_density(const DensitySpec& spec, double a, double b, double abs_tol = 1e-10);

}  // namespace clab
