#include "clab/distances.hpp"

#include <algorithm>
#include <cmath>

#include "clab/errors.hpp"
#include "clab/lp.hpp"
#include "clab/numeric.hpp"

namespace clab {

namespace {

constexpr double kTieTolerance = 1e-12;

void check_sets(std::span<const FiniteMeasure> a, std::span<const FiniteMeasure> b) {
    if (a.empty() || b.empty()) {
        throw ValidationError("hull_variation: both sets must be nonempty");
    }
    const std::size_t k = a.front().size();
    for (const auto& p : a) {
        if (p.size() != k) throw ValidationError("hull_variation: alphabet sizes differ");
    }
    for (const auto& q : b) {
        if (q.size() != k) throw ValidationError("hull_variation: alphabet sizes differ");
    }
}

std::vector<double> clean_weights(std::span<const double> raw) {
    std::vector<double> w(raw.begin(), raw.end());
    double s = 0.0;
    for (double& x : w) {
        x = std::max(0.0, x);
        s += x;
    }
    for (double& x : w) x /= s;
    return w;
}

// Points of (0,1) where f_p - f_q changes sign, together with the
// discontinuities of either density, sorted and bracketed by 0 and 1. The
// difference keeps a constant sign between consecutive points.
std::vector<double> sign_change_points(const DensitySpec& p, const DensitySpec& q) {
    auto h = [&](double x) { return p.density(x) - q.density(x); };
    const int freq = std::max(p.max_frequency(), q.max_frequency());
    const std::size_t grid = std::max<std::size_t>(4096, 256 * static_cast<std::size_t>(freq));

    std::vector<double> nodes;
    nodes.reserve(grid + 4);
    for (std::size_t i = 0; i <= grid; ++i) nodes.push_back(static_cast<double>(i) / grid);
    for (double x : p.breakpoints()) nodes.push_back(x);
    for (double x : q.breakpoints()) nodes.push_back(x);
    std::ranges::sort(nodes);
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    std::vector<double> cuts{0.0, 1.0};
    for (double x : p.breakpoints()) cuts.push_back(x);
    for (double x : q.breakpoints()) cuts.push_back(x);

    double prev_x = nodes.front();
    double prev_h = h(prev_x);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double x = nodes[i];
        const double hx = h(x);
        if (hx == 0.0) {
            cuts.push_back(x);
        } else if ((prev_h < 0.0 && hx > 0.0) || (prev_h > 0.0 && hx < 0.0)) {
            double lo = prev_x, hi = x, hlo = prev_h;
            for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double hm = h(mid);
                if ((hm < 0.0) == (hlo < 0.0) && hm != 0.0) {
                    lo = mid;
                    hlo = hm;
                } else {
                    hi = mid;
                }
            }
            cuts.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_h = hx;
    }
    std::ranges::sort(cuts);
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

}  // namespace

double total_variation(const FiniteMeasure& p, const FiniteMeasure& q) {
    if (p.size() != q.size()) {
        throw ValidationError("total_variation: alphabet sizes differ");
    }
    std::vector<double> diffs(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) diffs[j] = std::abs(p[j] - q[j]);
    return std::min(1.0, 0.5 * numeric::pairwise_sum(diffs));
}

double total_variation(const DensitySpec& p, const DensitySpec& q) {
    if (p == q) return 0.0;
    const auto cuts = sign_change_points(p, q);
    double total = 0.0;
    double prev = 0.0;  // F_p - F_q at 0
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const double cur = p.cdf(cuts[i]) - q.cdf(cuts[i]);
        total += std::abs(cur - prev);
        prev = cur;
    }
    return std::min(1.0, 0.5 * total);
}

double ks_distance(const DensitySpec& a, const DensitySpec& b) {
    if (a == b) return 0.0;
    // |F_a - F_b| peaks where a - b changes sign (or at a jump of either density).
    double best = 0.0;
    for (double x : sign_change_points(a, b)) {
        best = std::max(best, std::abs(a.cdf(x) - b.cdf(x)));
    }
    return best;
}

FiniteMeasure mixture(std::span<const FiniteMeasure> set, std::span<const double> weights) {
    if (set.empty() || set.size() != weights.size()) {
        throw ValidationError("mixture: need one weight per measure");
    }
    std::vector<double> w(set.front().size(), 0.0);
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set[i].size() != w.size()) throw ValidationError("mixture: alphabet sizes differ");
        for (std::size_t j = 0; j < w.size(); ++j) w[j] += weights[i] * set[i][j];
    }
    return normalize(w);
}

HullDistanceResult hull_variation(std::span<const FiniteMeasure> a, std::span<const FiniteMeasure> b) {
    check_sets(a, b);
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    const std::size_t k = a.front().size();
    // Dual form of  min TV(sum lambda_i P_i, sum mu_l Q_l):
    //   max s - r  over f in [0,1]^k  with  s <= f.P_i,  r >= f.Q_l.
    // Its row multipliers are optimal mixture weights. Columns: f | s+ s- | r+ r-.
    const std::size_t nvar = k + 4;
    lp::Problem problem;
    problem.objective.assign(nvar, 0.0);
    problem.objective[k] = -1.0;
    problem.objective[k + 1] = 1.0;
    problem.objective[k + 2] = 1.0;
    problem.objective[k + 3] = -1.0;
    problem.upper.assign(nvar, lp::kNoBound);
    for (std::size_t j = 0; j < k; ++j) problem.upper[j] = 1.0;
    for (std::size_t i = 0; i < na; ++i) {
        lp::Constraint con{std::vector<double>(nvar, 0.0), lp::Sense::less_equal, 0.0};
        for (std::size_t j = 0; j < k; ++j) con.coefficients[j] = -a[i][j];
        con.coefficients[k] = 1.0;
        con.coefficients[k + 1] = -1.0;
        problem.constraints.push_back(std::move(con));
    }
    for (std::size_t l = 0; l < nb; ++l) {
        lp::Constraint con{std::vector<double>(nvar, 0.0), lp::Sense::less_equal, 0.0};
        for (std::size_t j = 0; j < k; ++j) con.coefficients[j] = b[l][j];
        con.coefficients[k + 2] = -1.0;
        con.coefficients[k + 3] = 1.0;
        problem.constraints.push_back(std::move(con));
    }

    const auto sol = lp::solve(problem);
    if (sol.status != lp::Status::optimal || sol.duals.size() != na + nb) {
        throw NumericError("hull_variation: linear program not solved",
                           std::string("status=") +
                               (sol.status == lp::Status::optimal      ? "optimal without multipliers"
                                : sol.status == lp::Status::infeasible ? "infeasible"
                                                                       : "unbounded") +
                               " iterations=" + std::to_string(sol.iterations));
    }
    std::vector<double> weights(sol.duals.size());
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = -sol.duals[i];

    HullDistanceResult out;
    out.mixture_p = clean_weights(std::span(weights).subspan(0, na));
    out.mixture_q = clean_weights(std::span(weights).subspan(na, nb));
    out.lp_iterations = sol.iterations;
    out.value = total_variation(mixture(a, out.mixture_p), mixture(b, out.mixture_q));
    if (std::abs(out.value + sol.objective) > 1e-8) {
        throw NumericError("hull_variation: LP objective disagrees with mixture distance",
                           "lp=" + numeric::format_double(-sol.objective) +
                               " tv=" + numeric::format_double(out.value));
    }
    return out;
}

double kraft_bound(std::span<const FiniteMeasure> a, std::span<const FiniteMeasure> b) {
    return 1.0 - hull_variation(a, b).value;
}

RandomizedTest::RandomizedTest(std::vector<double> reject_prob) : reject_prob_(std::move(reject_prob)) {
    for (double r : reject_prob_) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw ValidationError("test rejection probabilities must lie in [0,1]");
        }
    }
}

double RandomizedTest::alpha(const FiniteMeasure& p) const {
    if (p.size() != reject_prob_.size()) throw ValidationError("test: alphabet size mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) s += reject_prob_[j] * p[j];
    return s;
}

double RandomizedTest::beta(const FiniteMeasure& q) const {
    if (q.size() != reject_prob_.size()) throw ValidationError("test: alphabet size mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) s += (1.0 - reject_prob_[j]) * q[j];
    return s;
}

OptimalTest optimal_test(std::span<const FiniteMeasure> a, std::span<const FiniteMeasure> b) {
    auto hull = hull_variation(a, b);
    auto p = mixture(a, hull.mixture_p);
    auto q = mixture(b, hull.mixture_q);
    std::vector<double> reject(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double d = q[j] - p[j];
        reject[j] = std::abs(d) <= kTieTolerance ? 0.5 : (d > 0.0 ? 1.0 : 0.0);
    }
    return OptimalTest{RandomizedTest(std::move(reject)), std::move(p), std::move(q), std::move(hull)};
}

}  // namespace clab
