#include <bit>
#include <cmath>
#include <iomanip>
#include <stdexcept>
#include <string>

#include "volte/bip.hpp"

namespace volte::bip {

LinearRow& BinaryProgram::add_eq(double rhs) {
    eq_rows.push_back({std::vector<double>(static_cast<std::size_t>(num_vars), 0.0), rhs});
    return eq_rows.back();
}

LinearRow& BinaryProgram::add_ge(double rhs) {
    ge_rows.push_back({std::vector<double>(static_cast<std::size_t>(num_vars), 0.0), rhs});
    return ge_rows.back();
}

void BinaryProgram::add_le(std::vector<double> coeffs, double rhs) {
    for (auto& a : coeffs) {
        a = -a;
    }
    ge_rows.push_back({std::move(coeffs), -rhs});
}

void BinaryProgram::validate() const {
    if (num_vars < 0) {
        throw std::invalid_argument("negative variable count");
    }
    const auto n = static_cast<std::size_t>(num_vars);
    if (objective.size() != n) {
        throw std::invalid_argument("objective length does not match variable count");
    }
    if (!var_labels.empty() && var_labels.size() != n) {
        throw std::invalid_argument("label count does not match variable count");
    }
    for (double c : objective) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("objective coefficient is not finite");
        }
    }
    auto check_rows = [n](const std::vector<LinearRow>& rows, const char* kind) {
        for (const auto& row : rows) {
            if (row.coeffs.size() != n) {
                throw std::invalid_argument(std::string(kind) + " row has wrong length");
            }
            if (!std::isfinite(row.rhs)) {
                throw std::invalid_argument(std::string(kind) + " row rhs is not finite");
            }
            for (double a : row.coeffs) {
                if (!std::isfinite(a)) {
                    throw std::invalid_argument(std::string(kind) + " coefficient is not finite");
                }
            }
        }
    };
    check_rows(eq_rows, "equality");
    check_rows(ge_rows, "inequality");
}

double BinaryProgram::evaluate(std::span<const int> x) const {
    double value = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] != 0) {
            value += objective[j];
        }
    }
    return value;
}

namespace {

double activity(const LinearRow& row, std::span<const int> x) {
    double sum = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] != 0) {
            sum += row.coeffs[j];
        }
    }
    return sum;
}

}  // namespace

bool BinaryProgram::satisfies(std::span<const int> x, double tol) const {
    if (x.size() != static_cast<std::size_t>(num_vars)) {
        return false;
    }
    for (int v : x) {
        if (v != 0 && v != 1) {
            return false;
        }
    }
    for (const auto& row : eq_rows) {
        if (std::abs(activity(row, x) - row.rhs) > tol) {
            return false;
        }
    }
    for (const auto& row : ge_rows) {
        if (activity(row, x) < row.rhs - tol) {
            return false;
        }
    }
    return true;
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal:
            return "optimal";
        case SolveStatus::infeasible:
            return "infeasible";
        case SolveStatus::timeout:
            return "timeout";
    }
    return "unknown";
}

void write_program_dump(std::ostream& out, const BinaryProgram& p) {
    const auto flags = out.flags();
    out << std::setprecision(17);
    out << "max";
    for (double c : p.objective) {
        out << ' ' << c;
    }
    out << '\n';
    auto write_rows = [&out](const std::vector<LinearRow>& rows, const char* sense) {
        for (const auto& row : rows) {
            out << sense;
            for (double a : row.coeffs) {
                out << ' ' << a;
            }
            out << ' ' << row.rhs << '\n';
        }
    };
    write_rows(p.eq_rows, "eq");
    write_rows(p.ge_rows, "ge");
    out.flags(flags);
}

SolveOutcome solve_exhaustive(const BinaryProgram& p) {
    p.validate();
    if (p.num_vars > kExhaustiveMaxVars) {
        throw std::invalid_argument("exhaustive enumeration limited to " +
                                    std::to_string(kExhaustiveMaxVars) + " variables, got " +
                                    std::to_string(p.num_vars));
    }
    const int n = p.num_vars;
    const std::size_t eqs = p.eq_rows.size();
    const std::size_t ges = p.ge_rows.size();

    // Gray-code walk: one variable flips per step, row activities updated incrementally.
    std::vector<int> x(static_cast<std::size_t>(n), 0);
    std::vector<double> eq_act(eqs, 0.0);
    std::vector<double> ge_act(ges, 0.0);
    double value = 0.0;

    SolveOutcome best;
    best.status = SolveStatus::infeasible;
    auto consider = [&] {
        for (std::size_t i = 0; i < eqs; ++i) {
            if (std::abs(eq_act[i] - p.eq_rows[i].rhs) > kFeasibilityTol) {
                return;
            }
        }
        for (std::size_t i = 0; i < ges; ++i) {
            if (ge_act[i] < p.ge_rows[i].rhs - kFeasibilityTol) {
                return;
            }
        }
        if (best.status != SolveStatus::optimal || value > best.objective_value + 1e-9) {
            best.status = SolveStatus::optimal;
            best.objective_value = value;
            best.assignment = x;
        }
    };

    consider();
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t step = 1; step < count; ++step) {
        const int j = std::countr_zero(step);
        const double sign = x[j] == 0 ? 1.0 : -1.0;
        x[j] ^= 1;
        value += sign * p.objective[j];
        for (std::size_t i = 0; i < eqs; ++i) {
            eq_act[i] += sign * p.eq_rows[i].coeffs[j];
        }
        for (std::size_t i = 0; i < ges; ++i) {
            ge_act[i] += sign * p.ge_rows[i].coeffs[j];
        }
        consider();
    }
    if (best.status == SolveStatus::optimal) {
        // recompute exactly; incremental sums can drift for non-integral data
        best.objective_value = p.evaluate(best.assignment);
        best.relaxation_bound = best.objective_value;
    }
    best.nodes = static_cast<std::int64_t>(count);
    return best;
}

}  // namespace volte::bip
