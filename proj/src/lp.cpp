#include "clab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clab/errors.hpp"

namespace clab::lp {

namespace {

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double rhs(std::size_t r) const { return at(r, cols_); }
    // The objective row is stored last.
    double& cost(std::size_t c) { return at(rows_, c); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double p = at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= p;
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
    }

    void remove_row(std::size_t r) {
        data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * (cols_ + 1)),
                    data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * (cols_ + 1)));
        --rows_;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

struct State {
    Tableau t;
    std::vector<std::size_t> basis;
    std::vector<double> upper;       // per column, kNoBound when absent
    std::vector<bool> complemented;  // column currently stands for upper - x
};

// Replaces nonbasic x_c (at 0) by upper_c - x_c, i.e. moves it to its bound.
void complement_nonbasic(State& s, std::size_t c) {
    const double u = s.upper[c];
    for (std::size_t r = 0; r <= s.t.rows(); ++r) {
        const double a = s.t.at(r, c);
        if (a == 0.0) continue;
        s.t.rhs(r) -= a * u;
        s.t.at(r, c) = -a;
    }
    s.complemented[c] = !s.complemented[c];
}

// Same for the basic variable of row r.
void complement_basic(State& s, std::size_t r) {
    const std::size_t b = s.basis[r];
    for (std::size_t c = 0; c < s.t.cols(); ++c) {
        if (c != b) s.t.at(r, c) = -s.t.at(r, c);
    }
    s.t.rhs(r) = s.upper[b] - s.t.rhs(r);
    s.complemented[b] = !s.complemented[b];
}

enum class StepResult { optimal, unbounded };

StepResult iterate(State& s, std::size_t active_cols, const Options& opt, std::size_t& iterations) {
    constexpr std::size_t kDegenerateRun = 50;
    auto& t = s.t;
    std::size_t degenerate = 0;
    while (true) {
        const bool bland = degenerate >= kDegenerateRun;
        std::size_t entering = active_cols;
        double most_negative = -opt.tolerance;
        for (std::size_t c = 0; c < active_cols; ++c) {
            if (t.cost(c) < most_negative) {
                entering = c;
                if (bland) break;
                most_negative = t.cost(c);
            }
        }
        if (entering == active_cols) return StepResult::optimal;

        // A basic variable either falls to 0 or rises to its upper bound.
        std::size_t leaving = t.rows();
        bool to_upper = false;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const double a = t.at(r, entering);
            double ratio;
            bool up;
            if (a > opt.tolerance) {
                ratio = std::max(0.0, t.rhs(r)) / a;
                up = false;
            } else if (a < -opt.tolerance && std::isfinite(s.upper[s.basis[r]])) {
                ratio = std::max(0.0, s.upper[s.basis[r]] - t.rhs(r)) / -a;
                up = true;
            } else {
                continue;
            }
            bool take = ratio < best - opt.tolerance;
            if (!take && leaving < t.rows() && ratio <= best + opt.tolerance) {
                take = bland ? s.basis[r] < s.basis[leaving] : std::abs(a) > std::abs(t.at(leaving, entering));
            }
            if (take) {
                best = std::min(best, ratio);
                leaving = r;
                to_upper = up;
            }
        }

        if (++iterations > opt.max_iterations) {
            throw NumericError("simplex did not converge", "iterations=" + std::to_string(iterations) +
                                                               " rows=" + std::to_string(t.rows()) +
                                                               " cols=" + std::to_string(t.cols()));
        }
        if (std::isfinite(s.upper[entering]) && s.upper[entering] <= best) {
            complement_nonbasic(s, entering);
            degenerate = 0;
            continue;
        }
        if (leaving == t.rows()) return StepResult::unbounded;
        degenerate = best <= opt.tolerance ? degenerate + 1 : 0;
        if (to_upper) complement_basic(s, leaving);
        t.pivot(leaving, entering);
        s.basis[leaving] = entering;
    }
}

// Rows are scaled by -1 so that the rhs is nonnegative, and ">= 0" rows
// become "<= 0" rows with a feasible slack.
struct RowForm {
    double sign;
    Sense sense;
};

RowForm normalize_row(const Constraint& con) {
    auto flipped = [](Sense s) {
        return s == Sense::less_equal ? Sense::greater_equal : s == Sense::greater_equal ? Sense::less_equal : s;
    };
    if (con.rhs < 0.0 || (con.rhs == 0.0 && con.sense == Sense::greater_equal)) {
        return {-1.0, flipped(con.sense)};
    }
    return {1.0, con.sense};
}

}  // namespace

Solution solve(const Problem& problem, const Options& opt) {
    const std::size_t n = problem.objective.size();
    const std::size_t m = problem.constraints.size();
    for (const auto& con : problem.constraints) {
        if (con.coefficients.size() != n) {
            throw ValidationError("lp: constraint width does not match objective");
        }
    }
    if (!problem.upper.empty() && problem.upper.size() != n) {
        throw ValidationError("lp: upper bounds do not match objective");
    }
    for (double u : problem.upper) {
        if (!(u >= 0.0)) throw ValidationError("lp: upper bounds must be nonnegative");
    }

    // Column layout: structural | slack/surplus | artificial.
    std::size_t n_slack = 0;
    std::size_t n_art = 0;
    for (const auto& con : problem.constraints) {
        if (con.sense != Sense::equal) ++n_slack;
        if (normalize_row(con).sense != Sense::less_equal) ++n_art;
    }
    const std::size_t real_cols = n + n_slack;
    const std::size_t total = real_cols + n_art;
    State s{Tableau(m, total), std::vector<std::size_t>(m), std::vector<double>(total, kNoBound),
            std::vector<bool>(total, false)};
    auto& t = s.t;
    for (std::size_t c = 0; c < n && !problem.upper.empty(); ++c) s.upper[c] = problem.upper[c];

    std::vector<double> row_sign(m);
    std::vector<std::size_t> identity_col(m);  // +e_r column of each normalized row
    std::size_t slack_col = n;
    std::size_t art_col = real_cols;
    for (std::size_t r = 0; r < m; ++r) {
        const auto& con = problem.constraints[r];
        const auto [sign, sense] = normalize_row(con);
        row_sign[r] = sign;
        for (std::size_t c = 0; c < n; ++c) t.at(r, c) = sign * con.coefficients[c];
        t.rhs(r) = sign * con.rhs;
        if (sense == Sense::less_equal) {
            t.at(r, slack_col) = 1.0;
            identity_col[r] = slack_col;
            s.basis[r] = slack_col++;
        } else {
            if (sense == Sense::greater_equal) t.at(r, slack_col++) = -1.0;
            t.at(r, art_col) = 1.0;
            identity_col[r] = art_col;
            s.basis[r] = art_col++;
        }
    }

    // Crash: a row whose artificial can be replaced by an unbounded structural
    // column occurring in that row only starts feasible.
    std::vector<bool> is_basic(total, false);
    for (std::size_t b : s.basis) is_basic[b] = true;
    for (std::size_t r = 0; r < m; ++r) {
        if (s.basis[r] < real_cols) continue;
        for (std::size_t c = 0; c < n; ++c) {
            if (is_basic[c] || std::isfinite(s.upper[c]) || !(t.at(r, c) > opt.tolerance)) continue;
            bool singleton = true;
            for (std::size_t o = 0; o < m && singleton; ++o) singleton = o == r || t.at(o, c) == 0.0;
            if (!singleton) continue;
            is_basic[s.basis[r]] = false;
            t.pivot(r, c);
            s.basis[r] = c;
            is_basic[c] = true;
            break;
        }
    }

    Solution sol;
    bool rows_dropped = false;

    // Phase 1: minimize the sum of artificials; artificials never re-enter.
    if (std::ranges::any_of(s.basis, [&](std::size_t b) { return b >= real_cols; })) {
        for (std::size_t c = 0; c <= total; ++c) t.cost(c) = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            if (s.basis[r] < real_cols) continue;
            for (std::size_t c = 0; c <= total; ++c) {
                if (c < real_cols || c == total) t.cost(c) -= t.at(r, c);
            }
        }
        iterate(s, real_cols, opt, sol.iterations);
        double scale = 1.0;
        for (const auto& con : problem.constraints) scale = std::max(scale, std::abs(con.rhs));
        if (-t.cost(total) > 1e3 * opt.tolerance * scale) {
            sol.status = Status::infeasible;
            return sol;
        }
        // Drive zero-valued artificials out of the basis, dropping redundant rows.
        for (std::size_t r = 0; r < t.rows();) {
            if (s.basis[r] < real_cols) {
                ++r;
                continue;
            }
            std::size_t col = real_cols;
            for (std::size_t c = 0; c < real_cols; ++c) {
                if (std::abs(t.at(r, c)) > opt.tolerance) {
                    col = c;
                    break;
                }
            }
            if (col < real_cols) {
                t.pivot(r, col);
                s.basis[r] = col;
                ++r;
            } else {
                t.remove_row(r);
                s.basis.erase(s.basis.begin() + static_cast<std::ptrdiff_t>(r));
                rows_dropped = true;
            }
        }
    }

    // Phase 2 over structural and slack columns.
    for (std::size_t c = 0; c <= total; ++c) {
        t.cost(c) = c < n ? (s.complemented[c] ? -problem.objective[c] : problem.objective[c]) : 0.0;
    }
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const double cb = t.cost(s.basis[r]);
        if (cb == 0.0) continue;
        for (std::size_t c = 0; c <= total; ++c) t.cost(c) -= cb * t.at(r, c);
    }
    if (iterate(s, real_cols, opt, sol.iterations) == StepResult::unbounded) {
        sol.status = Status::unbounded;
        return sol;
    }

    sol.status = Status::optimal;
    std::vector<double> value(total, 0.0);
    for (std::size_t r = 0; r < t.rows(); ++r) value[s.basis[r]] = std::max(0.0, t.rhs(r));
    sol.x.assign(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        const double v = s.complemented[c] ? s.upper[c] - value[c] : value[c];
        sol.x[c] = std::clamp(v, 0.0, s.upper[c]);
    }
    sol.objective = 0.0;
    for (std::size_t c = 0; c < n; ++c) sol.objective += problem.objective[c] * sol.x[c];

    // The multipliers y' of the normalized rows satisfy cost(identity column) = -y'.
    if (!rows_dropped) {
        sol.duals.assign(m, 0.0);
        for (std::size_t r = 0; r < m; ++r) sol.duals[r] = -row_sign[r] * t.cost(identity_col[r]);
    }
    return sol;
}

}  // namespace clab::lp
