#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "volte/bip.hpp"

namespace volte::bip {

namespace {

struct SparseRow {
    std::vector<int> index;
    std::vector<double> coeff;
    double rhs;
    bool equality;
};

std::vector<SparseRow> sparse_rows(const BinaryProgram& p) {
    std::vector<SparseRow> rows;
    auto add = [&rows](const LinearRow& row, bool equality) {
        SparseRow r{{}, {}, row.rhs, equality};
        for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
            if (row.coeffs[j] != 0.0) {
                r.index.push_back(static_cast<int>(j));
                r.coeff.push_back(row.coeffs[j]);
            }
        }
        rows.push_back(std::move(r));
    };
    for (const auto& row : p.eq_rows) {
        add(row, true);
    }
    for (const auto& row : p.ge_rows) {
        add(row, false);
    }
    return rows;
}

// Activity-bound propagation over 0/1 variables. Returns false when some row
// cannot be satisfied under the current fixings.
bool propagate(const std::vector<SparseRow>& rows, Fixings& fix) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& row : rows) {
            double lo = 0.0;
            double hi = 0.0;
            for (std::size_t k = 0; k < row.index.size(); ++k) {
                const double a = row.coeff[k];
                const int v = fix[row.index[k]];
                if (v < 0) {
                    (a > 0 ? hi : lo) += a;
                } else if (v == 1) {
                    lo += a;
                    hi += a;
                }
            }
            const double tol = kFeasibilityTol * (1.0 + std::abs(row.rhs));
            // a.x >= rhs
            if (hi < row.rhs - tol) {
                return false;
            }
            // a.x <= rhs for equalities
            if (row.equality && lo > row.rhs + tol) {
                return false;
            }
            for (std::size_t k = 0; k < row.index.size(); ++k) {
                const int j = row.index[k];
                if (fix[j] >= 0) {
                    continue;
                }
                const double a = row.coeff[k];
                int value;
                if (a > 0 && hi - a < row.rhs - tol) {
                    value = 1;
                } else if (a < 0 && hi + a < row.rhs - tol) {
                    value = 0;
                } else if (row.equality && a > 0 && lo + a > row.rhs + tol) {
                    value = 0;
                } else if (row.equality && a < 0 && lo - a > row.rhs + tol) {
                    value = 1;
                } else {
                    continue;
                }
                fix[j] = static_cast<std::int8_t>(value);
                changed = true;
                if (a > 0) {
                    (value == 1 ? lo : hi) += value == 1 ? a : -a;
                } else {
                    (value == 1 ? hi : lo) += value == 1 ? a : -a;
                }
            }
        }
    }
    return true;
}

constexpr int kCutRounds = 8;

// Chvatal-Gomory rounding of one >= row over binaries. Negative coefficients are
// complemented, coefficients above the right-hand side are capped (still valid
// for binaries), and for each multiplier 1/a_k the rounded-up row
// sum ceil(a_j/a_k) x_j >= ceil(b/a_k) is tried; the most violated cut at `x`
// is returned in the original variables.
std::optional<LinearRow> rounding_cut(const LinearRow& row, std::span<const double> x) {
    const std::size_t n = row.coeffs.size();
    std::vector<double> a(n);
    double b = row.rhs;
    for (std::size_t j = 0; j < n; ++j) {
        a[j] = std::abs(row.coeffs[j]);
        if (row.coeffs[j] < 0) {
            b += a[j];
        }
    }
    if (b <= kFeasibilityTol) {
        return std::nullopt;
    }
    std::vector<double> divisors;
    for (auto& v : a) {
        v = std::min(v, b);
        if (v > kFeasibilityTol) {
            divisors.push_back(v);
        }
    }
    std::sort(divisors.begin(), divisors.end());
    divisors.erase(std::unique(divisors.begin(), divisors.end()), divisors.end());

    auto rounded = [](double v) { return std::ceil(v - 1e-9); };
    double best_violation = 1e-6;
    std::optional<LinearRow> best;
    for (double d : divisors) {
        const double rhs = rounded(b / d);
        double activity = 0.0;
        double norm = 0.0;
        std::vector<double> c(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (a[j] == 0.0) {
                continue;
            }
            c[j] = rounded(a[j] / d);
            const double xj = row.coeffs[j] < 0 ? 1.0 - x[j] : x[j];
            activity += c[j] * xj;
            norm += c[j] * c[j];
        }
        const double violation = (rhs - activity) / std::sqrt(norm);
        if (violation > best_violation) {
            best_violation = violation;
            LinearRow cut{std::vector<double>(n, 0.0), rhs};
            for (std::size_t j = 0; j < n; ++j) {
                if (row.coeffs[j] < 0) {
                    cut.coeffs[j] = -c[j];
                    cut.rhs -= c[j];
                } else {
                    cut.coeffs[j] = c[j];
                }
            }
            best = std::move(cut);
        }
    }
    return best;
}

bool integral_objective(const BinaryProgram& p) {
    return std::all_of(p.objective.begin(), p.objective.end(),
                       [](double c) { return c == std::floor(c); });
}

}  // namespace

SolveOutcome solve_branch_and_bound(const BinaryProgram& p, const SolveLimits& limits,
                                    std::span<const int> hint) {
    p.validate();
    using Clock = std::chrono::steady_clock;
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(limits.time);
    const bool integer_objective = integral_objective(p);

    SolveOutcome out;
    out.status = SolveStatus::infeasible;
    const LpSolution root = solve_lp_relaxation(p);
    if (root.status == LpStatus::infeasible) {
        return out;
    }
    out.relaxation_bound = root.objective;

    // Root cut rounds: valid rounding cuts are appended to a working copy whose
    // relaxation every node then solves.
    BinaryProgram work = p;
    const std::size_t max_cuts = 2 * (p.eq_rows.size() + p.ge_rows.size()) + 20;
    std::size_t cuts = 0;
    LpSolution lp_root = root;
    for (int round = 0; round < kCutRounds && cuts < max_cuts; ++round) {
        if (lp_root.status == LpStatus::infeasible || Clock::now() > deadline) {
            break;
        }
        std::vector<LinearRow> found;
        for (const auto& row : work.ge_rows) {
            if (auto cut = rounding_cut(row, lp_root.values)) {
                found.push_back(std::move(*cut));
            }
        }
        if (found.empty()) {
            break;
        }
        for (auto& cut : found) {
            if (cuts++ < max_cuts) {
                work.ge_rows.push_back(std::move(cut));
            }
        }
        lp_root = solve_lp_relaxation(work);
    }
    const auto rows = sparse_rows(work);

    bool have_incumbent = false;
    if (hint.size() == static_cast<std::size_t>(p.num_vars) &&
        std::all_of(hint.begin(), hint.end(), [](int v) { return v == 0 || v == 1; }) &&
        p.satisfies(hint)) {
        have_incumbent = true;
        out.status = SolveStatus::optimal;
        out.assignment.assign(hint.begin(), hint.end());
        out.objective_value = p.evaluate(hint);
    }

    auto prunable = [&](double bound) {
        if (!have_incumbent) {
            return false;
        }
        if (integer_objective) {
            return std::floor(bound + kIntegralityTol) <= out.objective_value;
        }
        return bound <= out.objective_value + 1e-9 * (1.0 + std::abs(out.objective_value));
    };

    std::vector<Fixings> stack;
    stack.emplace_back(static_cast<std::size_t>(p.num_vars), -1);
    while (!stack.empty()) {
        if (Clock::now() > deadline || (limits.nodes > 0 && out.nodes >= limits.nodes)) {
            out.status = SolveStatus::timeout;
            if (!have_incumbent) {
                out.assignment.clear();
            }
            return out;
        }
        Fixings fix = std::move(stack.back());
        stack.pop_back();
        ++out.nodes;
        if (!propagate(rows, fix)) {
            continue;
        }
        const LpSolution lp = solve_lp_relaxation(work, fix);
        if (lp.status == LpStatus::infeasible || prunable(lp.objective)) {
            continue;
        }

        // Reduced-cost fixing: moving a nonbasic variable off its bound costs at
        // least |d_j|, so it stays put in every improving descendant.
        if (have_incumbent) {
            for (int j = 0; j < p.num_vars; ++j) {
                const double d = lp.reduced_costs[j];
                if (fix[j] < 0 && d != 0.0 && prunable(lp.objective - std::abs(d))) {
                    fix[j] = lp.values[j] > 0.5 ? 1 : 0;
                }
            }
        }

        int branch_var = -1;
        double best_distance = 1.0;
        for (int j = 0; j < p.num_vars; ++j) {
            const double v = lp.values[j];
            const double frac = v - std::floor(v);
            if (fix[j] >= 0 || frac <= kIntegralityTol || frac >= 1.0 - kIntegralityTol) {
                continue;
            }
            const double distance = std::abs(frac - 0.5);
            if (distance < best_distance) {
                best_distance = distance;
                branch_var = j;
            }
        }

        if (branch_var < 0) {
            std::vector<int> x(static_cast<std::size_t>(p.num_vars));
            for (int j = 0; j < p.num_vars; ++j) {
                x[j] = fix[j] >= 0 ? fix[j] : (lp.values[j] > 0.5 ? 1 : 0);
            }
            if (p.satisfies(x)) {
                const double value = p.evaluate(x);
                if (!have_incumbent || value > out.objective_value) {
                    have_incumbent = true;
                    out.status = SolveStatus::optimal;
                    out.assignment = std::move(x);
                    out.objective_value = value;
                }
                continue;
            }
            // Rounding noise or a fixing broke a row: keep searching the free variables.
            const auto it = std::find(fix.begin(), fix.end(), std::int8_t{-1});
            if (it == fix.end()) {
                continue;
            }
            branch_var = static_cast<int>(it - fix.begin());
        }

        ++out.branches;
        Fixings zero = fix;
        zero[branch_var] = 0;
        fix[branch_var] = 1;
        stack.push_back(std::move(zero));
        stack.push_back(std::move(fix));
    }
    return out;
}

}  // namespace volte::bip
