#pragma once

#include <chrono>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace volte::bip {

inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr double kIntegralityTol = 1e-6;

struct LinearRow {
    std::vector<double> coeffs;
    double rhs = 0.0;
};

/// Maximize objective . x over x in {0,1}^n subject to equality and >= rows.
struct BinaryProgram {
    int num_vars = 0;
    std::vector<double> objective;
    std::vector<LinearRow> eq_rows;
    std::vector<LinearRow> ge_rows;
    std::vector<std::string> var_labels;  // empty, or one per variable

    explicit BinaryProgram(int n = 0) : num_vars(n), objective(static_cast<std::size_t>(n), 0.0) {}

    /// Appends a zero row to fill in place.
    LinearRow& add_eq(double rhs);
    LinearRow& add_ge(double rhs);
    /// a.x <= rhs, stored as the negated >= row.
    void add_le(std::vector<double> coeffs, double rhs);

    /// Throws std::invalid_argument on size mismatches or non-finite data.
    void validate() const;
    double evaluate(std::span<const int> x) const;
    bool satisfies(std::span<const int> x, double tol = kFeasibilityTol) const;
};

enum class LpStatus { optimal, infeasible };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> values;
    double objective = 0.0;
    // Per free variable: objective change per unit increase from its value;
    // zero for basic and fixed variables.
    std::vector<double> reduced_costs;
    std::int64_t pivots = 0;
};

/// Per-variable bounds for the relaxation: -1 free in [0,1], 0 or 1 fixed.
using Fixings = std::vector<std::int8_t>;

/// LP over the box [0,1]^n with the program's rows.
LpSolution solve_lp_relaxation(const BinaryProgram& p);
LpSolution solve_lp_relaxation(const BinaryProgram& p, const Fixings& fixings);

enum class SolveStatus { optimal, infeasible, timeout };

const char* to_string(SolveStatus status);

struct SolveOutcome {
    SolveStatus status = SolveStatus::infeasible;
    std::vector<int> assignment;       // set when optimal, or the incumbent on timeout
    double objective_value = 0.0;
    double relaxation_bound = 0.0;     // root LP objective
    std::int64_t nodes = 0;
    std::int64_t branches = 0;

    bool has_assignment() const { return !assignment.empty(); }
};

/// Search budget of one branch-and-bound call. The node budget is deterministic;
/// the wall-clock budget is not. Zero nodes means no node budget.
struct SolveLimits {
    std::chrono::duration<double> time{86400.0};
    std::int64_t nodes = 0;

    SolveLimits() = default;
    template <typename Rep, typename Period>
    SolveLimits(std::chrono::duration<Rep, Period> time_limit, std::int64_t node_limit = 0)
        : time(std::chrono::duration_cast<std::chrono::duration<double>>(time_limit)),
          nodes(node_limit) {}
};

/// Depth-first branch-and-bound on the most fractional variable, "1" branch first,
/// with activity-bound propagation and reduced-cost fixing. A feasible `hint`
/// seeds the incumbent; an infeasible or wrongly sized hint is ignored. Exhausting
/// either budget ends the search with status timeout.
SolveOutcome solve_branch_and_bound(const BinaryProgram& p, const SolveLimits& limits,
                                    std::span<const int> hint = {});

inline constexpr int kExhaustiveMaxVars = 25;

/// Enumerates all 2^n points. Rejects n > 25.
SolveOutcome solve_exhaustive(const BinaryProgram& p);

/// One line per row: "max|eq|ge", space-separated coefficients, rhs (objective has none).
void write_program_dump(std::ostream& out, const BinaryProgram& p);

}  // namespace volte::bip
