#include "clab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "clab/errors.hpp"
#include "clab/numeric.hpp"

namespace clab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// (1 - cos(2 pi j x)) / (2 pi j): the integral of sin(2 pi j t) over [0, x].
double sine_primitive(int j, double x) {
    const double w = kTwoPi * j;
    return (1.0 - std::cos(w * x)) / w;
}

void check_weights(std::span<const double> weights) {
    if (weights.empty()) {
        throw ValidationError("probability vector must be nonempty");
    }
    for (double w : weights) {
        if (!std::isfinite(w)) {
            throw ValidationError("probability vector has a non-finite entry");
        }
        if (w < 0.0) {
            throw ValidationError("probability vector has a negative entry");
        }
    }
}

}  // namespace

FiniteMeasure::FiniteMeasure(std::vector<double> weights, double tol) : weights_(std::move(weights)) {
    check_weights(weights_);
    const double total = numeric::pairwise_sum(weights_);
    if (std::abs(total - 1.0) > tol) {
        std::ostringstream msg;
        msg << "probability vector sums to " << numeric::format_double(total) << ", not 1";
        throw ValidationError(msg.str());
    }
}

FiniteMeasure FiniteMeasure::mix(const FiniteMeasure& other, double lambda) const {
    if (other.size() != size()) {
        throw ValidationError("mix: alphabet sizes differ");
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw ValidationError("mix: lambda must lie in [0,1]");
    }
    std::vector<double> w(size());
    for (std::size_t j = 0; j < size(); ++j) {
        w[j] = lambda * weights_[j] + (1.0 - lambda) * other.weights_[j];
    }
    return FiniteMeasure(std::move(w), kQuadratureTolerance);
}

FiniteMeasure normalize(std::span<const double> weights) {
    check_weights(weights);
    const double total = numeric::pairwise_sum(weights);
    if (total <= 0.0) {
        throw ValidationError("normalize: all weights are zero");
    }
    std::vector<double> w(weights.begin(), weights.end());
    for (double& x : w) x /= total;
    return FiniteMeasure(std::move(w));
}

// ---------------------------------------------------------------------------
// DensitySpec

DensitySpec DensitySpec::uniform() { return {DensityKind::uniform, 0, 0.0}; }

DensitySpec DensitySpec::one_plus_sine(int frequency) {
    if (frequency < 1) {
        throw ValidationError("one_plus_sine: frequency must be >= 1");
    }
    return {DensityKind::one_plus_sine, frequency, 0.0};
}

DensitySpec DensitySpec::cesaro_mixture(int order) {
    if (order < 1) {
        throw ValidationError("cesaro_mixture: order must be >= 1");
    }
    return {DensityKind::cesaro_mixture, order, 0.0};
}

DensitySpec DensitySpec::pu_family(double u) {
    if (!(u >= 0.0 && u < 1.0)) {
        throw ValidationError("pu_family: u must lie in [0,1) for a nonnegative density");
    }
    return {DensityKind::pu_family, 0, u};
}

double DensitySpec::density(double x) const {
    switch (kind_) {
        case DensityKind::uniform:
            return 1.0;
        case DensityKind::one_plus_sine:
            return 1.0 + std::sin(kTwoPi * index_ * x);
        case DensityKind::cesaro_mixture: {
            double s = 0.0;
            for (int j = 1; j <= index_; ++j) s += std::sin(kTwoPi * j * x);
            return 1.0 + s / index_;
        }
        case DensityKind::pu_family:
            return x <= 0.5 ? 1.0 - u_ : 1.0 + u_;
    }
    return 0.0;
}

double DensitySpec::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    switch (kind_) {
        case DensityKind::uniform:
            return x;
        case DensityKind::one_plus_sine:
            return x + sine_primitive(index_, x);
        case DensityKind::cesaro_mixture: {
            double s = 0.0;
            for (int j = 1; j <= index_; ++j) s += sine_primitive(j, x);
            return x + s / index_;
        }
        case DensityKind::pu_family:
            return x <= 0.5 ? (1.0 - u_) * x : 0.5 * (1.0 - u_) + (1.0 + u_) * (x - 0.5);
    }
    return 0.0;
}

double DensitySpec::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("quantile: probability outside [0,1]");
    }
    switch (kind_) {
        case DensityKind::uniform:
            return p;
        case DensityKind::pu_family: {
            const double mid = 0.5 * (1.0 - u_);
            return p <= mid ? p / (1.0 - u_) : 0.5 + (p - mid) / (1.0 + u_);
        }
        default:
            break;
    }
    // The sine families have a continuous nondecreasing CDF: safeguarded Newton.
    double lo = 0.0;
    double hi = 1.0;
    double x = p;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double fx = cdf(x) - p;
        if (fx == 0.0) return x;
        if (fx < 0.0) lo = x; else hi = x;
        const double d = density(x);
        double next = d > 1e-12 ? x - fx / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

int DensitySpec::max_frequency() const noexcept {
    switch (kind_) {
        case DensityKind::one_plus_sine:
        case DensityKind::cesaro_mixture:
            return index_;
        default:
            return 0;
    }
}

std::vector<double> DensitySpec::breakpoints() const {
    if (kind_ == DensityKind::pu_family && u_ != 0.0) return {0.5};
    return {};
}

std::string DensitySpec::label() const {
    std::ostringstream out;
    switch (kind_) {
        case DensityKind::uniform:
            out << "uniform";
            break;
        case DensityKind::one_plus_sine:
            out << "one_plus_sine(" << index_ << ")";
            break;
        case DensityKind::cesaro_mixture:
            out << "cesaro_mixture(" << index_ << ")";
            break;
        case DensityKind::pu_family:
            out << "pu_family(" << numeric::format_double(u_) << ")";
            break;
    }
    return out.str();
}

std::string model_label(const Model& model) {
    if (const auto* d = std::get_if<DensitySpec>(&model)) return d->label();
    const auto& p = std::get<FiniteMeasure>(model);
    std::string out = "finite(";
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (j) out += ",";
        out += numeric::format_double(p[j]);
    }
    return out + ")";
}

// ---------------------------------------------------------------------------
// Partition

Partition Partition::identity(std::size_t alphabet_size) {
    std::vector<std::vector<std::size_t>> cells(alphabet_size);
    for (std::size_t j = 0; j < alphabet_size; ++j) cells[j] = {j};
    return atoms(std::move(cells), alphabet_size);
}

Partition Partition::atoms(std::vector<std::vector<std::size_t>> cells, std::size_t alphabet_size) {
    if (cells.size() < 2) {
        throw ValidationError("partition needs at least two cells");
    }
    Partition p;
    p.base_ = Base::alphabet;
    p.alphabet_size_ = alphabet_size;
    constexpr std::size_t unassigned = static_cast<std::size_t>(-1);
    p.cell_of_atom_.assign(alphabet_size, unassigned);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].empty()) {
            throw ValidationError("partition cell is empty");
        }
        for (std::size_t atom : cells[c]) {
            if (atom >= alphabet_size) {
                throw ValidationError("partition refers to an atom outside the alphabet");
            }
            if (p.cell_of_atom_[atom] != unassigned) {
                throw ValidationError("partition cells overlap");
            }
            p.cell_of_atom_[atom] = c;
        }
    }
    if (std::ranges::find(p.cell_of_atom_, unassigned) != p.cell_of_atom_.end()) {
        throw ValidationError("partition cells do not cover the alphabet");
    }
    p.atom_cells_ = std::move(cells);
    return p;
}

Partition Partition::intervals(std::vector<double> breakpoints) {
    if (breakpoints.size() < 3) {
        throw ValidationError("partition needs at least two cells");
    }
    if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0) {
        throw ValidationError("interval partition must start at 0 and end at 1");
    }
    for (std::size_t j = 1; j < breakpoints.size(); ++j) {
        if (!(breakpoints[j] > breakpoints[j - 1])) {
            throw ValidationError("interval partition breakpoints must be strictly increasing");
        }
    }
    Partition p;
    p.base_ = Base::interval;
    p.breakpoints_ = std::move(breakpoints);
    return p;
}

Partition Partition::equal_intervals(std::size_t cells) {
    if (cells < 2) {
        throw ValidationError("partition needs at least two cells");
    }
    std::vector<double> b(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j) b[j] = static_cast<double>(j) / cells;
    b.back() = 1.0;
    return intervals(std::move(b));
}

std::size_t Partition::size() const noexcept {
    return base_ == Base::alphabet ? atom_cells_.size() : breakpoints_.size() - 1;
}

std::size_t Partition::cell_of_point(double x) const {
    if (base_ != Base::interval) {
        throw ValidationError("cell_of_point: not an interval partition");
    }
    // cell j is (b_j, b_{j+1}]
    const auto it = std::lower_bound(breakpoints_.begin() + 1, breakpoints_.end() - 1, x);
    return static_cast<std::size_t>(it - (breakpoints_.begin() + 1));
}

std::string Partition::label() const {
    std::ostringstream out;
    if (base_ == Base::interval) {
        out << "intervals(";
        for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
            if (j) out << ",";
            out << numeric::format_double(breakpoints_[j]);
        }
        out << ")";
    } else {
        out << "atoms(";
        for (std::size_t c = 0; c < atom_cells_.size(); ++c) {
            if (c) out << "|";
            for (std::size_t i = 0; i < atom_cells_[c].size(); ++i) {
                if (i) out << ",";
                out << atom_cells_[c][i];
            }
        }
        out << ")";
    }
    return out.str();
}

// ---------------------------------------------------------------------------

std::vector<double> induced_vector(const Model& model, const Partition& partition) {
    if (const auto* p = std::get_if<FiniteMeasure>(&model)) {
        if (partition.base() != Partition::Base::alphabet || partition.alphabet_size() != p->size()) {
            throw ValidationError("induced_vector: partition is not over this measure's alphabet");
        }
        std::vector<double> v(partition.size(), 0.0);
        for (std::size_t c = 0; c < partition.size(); ++c) {
            for (std::size_t atom : partition.atom_cells()[c]) v[c] += (*p)[atom];
        }
        return v;
    }
    const auto& spec = std::get<DensitySpec>(model);
    if (partition.base() != Partition::Base::interval) {
        throw ValidationError("induced_vector: density needs an interval partition");
    }
    const auto& b = partition.breakpoints();
    std::vector<double> v(partition.size());
    for (std::size_t c = 0; c < v.size(); ++c) {
        v[c] = spec.cdf(b[c + 1]) - spec.cdf(b[c]);
    }
    return v;
}

FiniteMeasure discretize(const DensitySpec& spec, std::size_t grid_size) {
    if (grid_size < 2) {
        throw ValidationError("discretize: grid_size must be >= 2");
    }
    auto v = induced_vector(spec, Partition::equal_intervals(grid_size));
    for (double& w : v) {
        if (w < 0.0) {
            if (w < -kQuadratureTolerance) {
                throw ValidationError("discretize: density is negative on the domain");
            }
            w = 0.0;
        }
    }
    return FiniteMeasure(std::move(v), kQuadratureTolerance);
}

double integrate_density(const DensitySpec& spec, double a, double b, double abs_tol) {
    if (!(0.0 <= a && a <= b && b <= 1.0)) {
        throw ValidationError("integrate_density: need 0 <= a <= b <= 1");
    }
    auto f = [&spec](double x) { return spec.density(x); };
    // Integrate separately on each side of a discontinuity and on each period
    // of the highest frequency.
    std::vector<double> cuts{a};
    for (double x : spec.breakpoints()) {
        if (x > a && x < b) cuts.push_back(x);
    }
    const int freq = spec.max_frequency();
    if (freq > 0) {
        for (int j = 1; j < 4 * freq; ++j) {
            const double x = static_cast<double>(j) / (4 * freq);
            if (x > a && x < b) cuts.push_back(x);
        }
    }
    cuts.push_back(b);
    std::ranges::sort(cuts);
    double total = 0.0;
    const double tol = abs_tol / static_cast<double>(cuts.size());
    for (std::size_t j = 1; j < cuts.size(); ++j) {
        total += numeric::adaptive_simpson(f, cuts[j - 1], cuts[j], tol);
    }
    return total;
}

}  // namespace clab
