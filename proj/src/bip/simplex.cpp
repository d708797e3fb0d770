#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "volte/bip.hpp"

namespace volte::bip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kTieTol = 1e-12;
// Dantzig pricing until this many consecutive degenerate pivots, then Bland's rule.
constexpr int kBlandAfter = 30;

// Dense tableau simplex for max c.x, rows = b, 0 <= x <= ub.
// Variables at their upper bound are complemented (x -> ub - x) so every
// nonbasic variable sits at zero.
class BoundedSimplex {
  public:
    BoundedSimplex(int rows, int cols)
        : m_(rows),
          cols_(cols),
          tab_(static_cast<std::size_t>(rows) * cols, 0.0),
          rhs_(rows, 0.0),
          basis_(rows, -1),
          ub_(cols, kInf),
          flipped_(cols, 0),
          barred_(cols, 0),
          is_basic_(cols, 0),
          rc_phase1_(cols, 0.0),
          rc_phase2_(cols, 0.0) {}

    double& at(int i, int j) { return tab_[static_cast<std::size_t>(i) * cols_ + j]; }
    double at(int i, int j) const { return tab_[static_cast<std::size_t>(i) * cols_ + j]; }

    void set_rhs(int i, double b) { rhs_[i] = b; }
    void set_upper(int j, double u) { ub_[j] = u; }
    void set_barred(int j) { barred_[j] = 1; }
    void set_basic(int i, int j) {
        basis_[i] = j;
        is_basic_[j] = 1;
    }
    void set_phase2_cost(int j, double c) { rc_phase2_[j] = c; }

    // Phase-1 reduced costs for maximizing minus the sum of the given artificial columns.
    void init_phase1(const std::vector<int>& artificial_rows) {
        z_phase1_ = 0.0;
        for (int i : artificial_rows) {
            const int a = basis_[i];
            rc_phase1_[a] = -1.0;
        }
        for (int i : artificial_rows) {
            for (int j = 0; j < cols_; ++j) {
                rc_phase1_[j] += at(i, j);
            }
            z_phase1_ -= rhs_[i];
        }
    }

    double phase1_objective() const { return z_phase1_; }

    void run_phase1(double tol) { optimize(rc_phase1_, z_phase1_, tol); }
    void run_phase2(double tol) { optimize(rc_phase2_, z_phase2_, tol); }

    double value(int j) const {
        double v = 0.0;
        if (is_basic_[j]) {
            for (int i = 0; i < m_; ++i) {
                if (basis_[i] == j) {
                    v = rhs_[i];
                    break;
                }
            }
        }
        return flipped_[j] ? ub_[j] - v : v;
    }

    // Objective change per unit increase of structural j from its current bound.
    double reduced_cost(int j) const {
        if (is_basic_[j]) {
            return 0.0;
        }
        return flipped_[j] ? -rc_phase2_[j] : rc_phase2_[j];
    }

    std::int64_t pivots() const { return pivots_; }

  private:
    void complement_nonbasic(int j) {
        const double u = ub_[j];
        for (int i = 0; i < m_; ++i) {
            double& a = at(i, j);
            rhs_[i] -= a * u;
            a = -a;
        }
        z_phase1_ += rc_phase1_[j] * u;
        rc_phase1_[j] = -rc_phase1_[j];
        z_phase2_ += rc_phase2_[j] * u;
        rc_phase2_[j] = -rc_phase2_[j];
        flipped_[j] ^= 1;
    }

    void complement_basic(int r) {
        const int j = basis_[r];
        double* row = &tab_[static_cast<std::size_t>(r) * cols_];
        for (int k = 0; k < cols_; ++k) {
            if (k != j) {
                row[k] = -row[k];
            }
        }
        rhs_[r] = ub_[j] - rhs_[r];
        flipped_[j] ^= 1;
    }

    void pivot(int r, int e) {
        double* prow = &tab_[static_cast<std::size_t>(r) * cols_];
        const double inv = 1.0 / prow[e];
        for (int k = 0; k < cols_; ++k) {
            prow[k] *= inv;
        }
        prow[e] = 1.0;
        rhs_[r] *= inv;
        for (int i = 0; i < m_; ++i) {
            if (i == r) {
                continue;
            }
            double* row = &tab_[static_cast<std::size_t>(i) * cols_];
            const double f = row[e];
            if (f == 0.0) {
                continue;
            }
            for (int k = 0; k < cols_; ++k) {
                row[k] -= f * prow[k];
            }
            row[e] = 0.0;
            rhs_[i] -= f * rhs_[r];
        }
        auto update_cost_row = [&](std::vector<double>& rc, double& z) {
            const double f = rc[e];
            if (f == 0.0) {
                return;
            }
            for (int k = 0; k < cols_; ++k) {
                rc[k] -= f * prow[k];
            }
            rc[e] = 0.0;
            z += f * rhs_[r];
        };
        update_cost_row(rc_phase1_, z_phase1_);
        update_cost_row(rc_phase2_, z_phase2_);
        is_basic_[basis_[r]] = 0;
        basis_[r] = e;
        is_basic_[e] = 1;
        ++pivots_;
    }

    void optimize(std::vector<double>& rc, double& z, double tol) {
        (void)z;
        int degenerate_streak = 0;
        const std::int64_t limit = 200LL * (m_ + cols_) + 1000;
        for (std::int64_t iter = 0;; ++iter) {
            if (iter > limit) {
                throw std::runtime_error("simplex iteration limit exceeded");
            }
            const bool bland = degenerate_streak >= kBlandAfter;
            int enter = -1;
            double best = tol;
            for (int j = 0; j < cols_; ++j) {
                if (is_basic_[j] || barred_[j] || ub_[j] <= 0.0 || rc[j] <= tol) {
                    continue;
                }
                if (bland) {
                    enter = j;
                    break;
                }
                if (rc[j] > best) {
                    best = rc[j];
                    enter = j;
                }
            }
            if (enter < 0) {
                return;
            }

            double theta = ub_[enter];
            int leave = -1;
            bool leave_at_upper = false;
            double leave_mag = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double a = at(i, enter);
                double t;
                bool upper;
                if (a > kPivotTol) {
                    t = std::max(rhs_[i], 0.0) / a;
                    upper = false;
                } else if (a < -kPivotTol && ub_[basis_[i]] < kInf) {
                    t = std::max(ub_[basis_[i]] - rhs_[i], 0.0) / -a;
                    upper = true;
                } else {
                    continue;
                }
                bool take = false;
                if (t < theta - kTieTol) {
                    take = true;
                } else if (t <= theta + kTieTol && leave >= 0) {
                    take = bland ? basis_[i] < basis_[leave] : std::abs(a) > leave_mag;
                }
                if (take) {
                    theta = t;
                    leave = i;
                    leave_at_upper = upper;
                    leave_mag = std::abs(a);
                }
            }
            if (theta == kInf) {
                throw std::runtime_error("simplex: unbounded direction in a box-bounded program");
            }
            degenerate_streak = theta <= kTieTol ? degenerate_streak + 1 : 0;
            if (leave < 0) {
                complement_nonbasic(enter);
                continue;
            }
            if (leave_at_upper) {
                complement_basic(leave);
            }
            pivot(leave, enter);
        }
    }

    int m_;
    int cols_;
    std::vector<double> tab_;
    std::vector<double> rhs_;
    std::vector<int> basis_;
    std::vector<double> ub_;
    std::vector<char> flipped_;
    std::vector<char> barred_;
    std::vector<char> is_basic_;
    std::vector<double> rc_phase1_;
    std::vector<double> rc_phase2_;
    double z_phase1_ = 0.0;
    double z_phase2_ = 0.0;
    std::int64_t pivots_ = 0;
};

struct ReducedRow {
    std::vector<std::pair<int, double>> terms;  // (free-variable position, coefficient)
    double rhs;
    bool equality;
};

}  // namespace

LpSolution solve_lp_relaxation(const BinaryProgram& p) {
    return solve_lp_relaxation(p, Fixings(static_cast<std::size_t>(p.num_vars), -1));
}

LpSolution solve_lp_relaxation(const BinaryProgram& p, const Fixings& fixings) {
    p.validate();
    const int n = p.num_vars;
    if (fixings.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("fixings length does not match variable count");
    }

    std::vector<int> free_vars;
    std::vector<int> position(static_cast<std::size_t>(n), -1);
    for (int j = 0; j < n; ++j) {
        if (fixings[j] < 0) {
            position[j] = static_cast<int>(free_vars.size());
            free_vars.push_back(j);
        }
    }

    double scale = 1.0;
    std::vector<ReducedRow> rows;
    LpSolution infeasible;
    infeasible.status = LpStatus::infeasible;

    auto reduce = [&](const LinearRow& row, bool equality) -> bool {
        ReducedRow r{{}, row.rhs, equality};
        for (int j = 0; j < n; ++j) {
            const double a = row.coeffs[j];
            if (a == 0.0) {
                continue;
            }
            if (fixings[j] < 0) {
                r.terms.emplace_back(position[j], a);
            } else if (fixings[j] == 1) {
                r.rhs -= a;
            }
        }
        scale = std::max(scale, std::abs(row.rhs));
        if (r.terms.empty()) {
            const double tol = kFeasibilityTol * (1.0 + std::abs(row.rhs));
            return equality ? std::abs(r.rhs) <= tol : r.rhs <= tol;
        }
        rows.push_back(std::move(r));
        return true;
    };
    for (const auto& row : p.eq_rows) {
        if (!reduce(row, true)) {
            return infeasible;
        }
    }
    for (const auto& row : p.ge_rows) {
        if (!reduce(row, false)) {
            return infeasible;
        }
    }

    // Column layout: free structurals, one surplus per >= row, then artificials.
    const int nf = static_cast<int>(free_vars.size());
    const int m = static_cast<int>(rows.size());
    int surplus_count = 0;
    for (const auto& r : rows) {
        surplus_count += r.equality ? 0 : 1;
    }
    // Rows whose surplus can start basic need no artificial.
    std::vector<char> needs_artificial(m, 1);
    for (int i = 0; i < m; ++i) {
        if (!rows[i].equality && rows[i].rhs <= 0.0) {
            needs_artificial[i] = 0;
        }
    }
    const int artificial_count =
        static_cast<int>(std::count(needs_artificial.begin(), needs_artificial.end(), 1));
    const int cols = nf + surplus_count + artificial_count;

    BoundedSimplex lp(m, cols);
    for (int j = 0; j < nf; ++j) {
        lp.set_upper(j, 1.0);
        lp.set_phase2_cost(j, p.objective[free_vars[j]]);
    }
    std::vector<int> artificial_rows;
    int next_surplus = nf;
    int next_artificial = nf + surplus_count;
    for (int i = 0; i < m; ++i) {
        const auto& r = rows[i];
        // sign so the starting basic variable is non-negative
        const bool negate = r.equality ? r.rhs < 0.0 : r.rhs <= 0.0;
        const double s = negate ? -1.0 : 1.0;
        for (const auto& [pos, a] : r.terms) {
            lp.at(i, pos) = s * a;
        }
        lp.set_rhs(i, s * r.rhs);
        if (!r.equality) {
            lp.at(i, next_surplus) = -s;
            if (!needs_artificial[i]) {
                lp.set_basic(i, next_surplus);
            }
            ++next_surplus;
        }
        if (needs_artificial[i]) {
            lp.at(i, next_artificial) = 1.0;
            lp.set_basic(i, next_artificial);
            lp.set_barred(next_artificial);
            artificial_rows.push_back(i);
            ++next_artificial;
        }
    }

    double cost_scale = 1.0;
    for (int j : free_vars) {
        cost_scale = std::max(cost_scale, std::abs(p.objective[j]));
    }

    if (!artificial_rows.empty()) {
        lp.init_phase1(artificial_rows);
        lp.run_phase1(kFeasibilityTol * scale);
        if (lp.phase1_objective() < -kFeasibilityTol * scale * std::max(1.0, std::sqrt(m))) {
            infeasible.pivots = lp.pivots();
            return infeasible;
        }
        for (int a = nf + surplus_count; a < cols; ++a) {
            lp.set_upper(a, 0.0);
        }
    }
    lp.run_phase2(kFeasibilityTol * cost_scale);

    LpSolution out;
    out.status = LpStatus::optimal;
    out.values.assign(static_cast<std::size_t>(n), 0.0);
    out.reduced_costs.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        if (fixings[j] >= 0) {
            out.values[j] = fixings[j];
        }
    }
    for (int j = 0; j < nf; ++j) {
        out.values[free_vars[j]] = std::clamp(lp.value(j), 0.0, 1.0);
        out.reduced_costs[free_vars[j]] = lp.reduced_cost(j);
    }
    double objective = 0.0;
    for (int j = 0; j < n; ++j) {
        objective += p.objective[j] * out.values[j];
    }
    out.objective = objective;
    out.pivots = lp.pivots();
    return out;
}

}  // namespace volte::bip
