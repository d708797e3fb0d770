#include <algorithm>
#include <stdexcept>
#include <string>

#include "detail.hpp"
#include "volte/ratemap.hpp"
#include "volte/sched.hpp"

namespace volte {

namespace {

double cover_bits(int bits) {
    return std::min(bits, kVoltePacketBits);
}

void check_dimensions(const BitsMatrix& bits, int num_volte, int num_data, int num_tti) {
    if (num_volte < 0 || num_data < 0 || num_tti < 1) {
        throw std::invalid_argument("frame program needs U, K >= 0 and T >= 1");
    }
    if (bits.cols() != static_cast<std::size_t>(num_volte + num_data)) {
        throw std::invalid_argument("bits matrix has " + std::to_string(bits.cols()) +
                                    " users, expected " + std::to_string(num_volte + num_data));
    }
}

// Same optimum as the literal frame program. Only the best data user per PRB is
// kept (data users are otherwise unconstrained), VoLTE variables on zero-bit PRBs
// are dropped, and when `break_symmetry` is set the interchangeable TTIs are
// ordered: user u may only use TTIs 0..u, and TTIs past min(U, T) carry data only;
// the cover rows then also cap each PRB's bits at one packet, which keeps the
// integer points and tightens the relaxation. Without the flag the program has
// the literal program's relaxation optimum as well.
struct ReducedFrame {
    bip::BinaryProgram program{0};
    int volte_ttis = 0;                      // TTIs that may carry VoLTE
    std::vector<int> y_var;                  // [u * T + t] -> var or -1
    std::vector<int> x_var;                  // [(t * N + n) * U + u] -> var or -1
    std::vector<int> d_var;                  // [t * N + n] -> var or -1
    std::vector<int> best_data;              // per PRB, user id or -1
    double constant = 0.0;
};

ReducedFrame reduce_frame(const BitsMatrix& bits, int num_volte, int num_data, int num_tti,
                          bool break_symmetry) {
    const int N = static_cast<int>(bits.rows());
    const int U = num_volte;
    const int T = num_tti;
    ReducedFrame r;
    r.volte_ttis = break_symmetry ? std::min(U, T) : (U > 0 ? T : 0);
    r.best_data.resize(static_cast<std::size_t>(N));
    double data_row_value = 0.0;
    for (int n = 0; n < N; ++n) {
        r.best_data[n] = detail::best_data_user(bits, n, U, num_data);
        if (r.best_data[n] >= 0) {
            data_row_value += bits(n, r.best_data[n]);
        }
    }
    r.constant = (T - r.volte_ttis) * data_row_value;

    auto allowed = [&](int u, int t) { return t < r.volte_ttis && (!break_symmetry || t <= u); };

    int count = 0;
    r.y_var.assign(static_cast<std::size_t>(U) * T, -1);
    r.x_var.assign(static_cast<std::size_t>(T) * N * U, -1);
    r.d_var.assign(static_cast<std::size_t>(T) * N, -1);
    std::vector<double> objective;
    for (int t = 0; t < r.volte_ttis; ++t) {
        for (int u = 0; u < U; ++u) {
            if (!allowed(u, t)) {
                continue;
            }
            r.y_var[u * T + t] = count++;
            objective.push_back(0.0);
            for (int n = 0; n < N; ++n) {
                if (bits(n, u) > 0) {
                    r.x_var[(t * N + n) * U + u] = count++;
                    objective.push_back(0.0);
                }
            }
        }
        for (int n = 0; n < N; ++n) {
            if (r.best_data[n] >= 0) {
                r.d_var[t * N + n] = count++;
                objective.push_back(bits(n, r.best_data[n]));
            }
        }
    }

    bip::BinaryProgram& p = r.program;
    p = bip::BinaryProgram(count);
    p.objective = std::move(objective);
    for (int t = 0; t < r.volte_ttis; ++t) {
        for (int n = 0; n < N; ++n) {
            std::vector<double> row(static_cast<std::size_t>(count), 0.0);
            for (int u = 0; u < U; ++u) {
                if (int v = r.x_var[(t * N + n) * U + u]; v >= 0) {
                    row[v] = 1.0;
                }
            }
            if (int v = r.d_var[t * N + n]; v >= 0) {
                row[v] = 1.0;
                p.add_eq(1.0).coeffs = std::move(row);
            } else {
                p.add_le(std::move(row), 1.0);
            }
        }
    }
    for (int u = 0; u < U; ++u) {
        auto& row = p.add_eq(1.0);
        for (int t = 0; t < T; ++t) {
            if (int v = r.y_var[u * T + t]; v >= 0) {
                row.coeffs[v] = 1.0;
            }
        }
    }
    for (int t = 0; t < r.volte_ttis; ++t) {
        for (int u = 0; u < U; ++u) {
            const int y = r.y_var[u * T + t];
            if (y < 0) {
                continue;
            }
            auto& row = p.add_ge(0.0);
            row.coeffs[y] = -static_cast<double>(kVoltePacketBits);
            for (int n = 0; n < N; ++n) {
                if (int v = r.x_var[(t * N + n) * U + u]; v >= 0) {
                    row.coeffs[v] = break_symmetry ? cover_bits(bits(n, u)) : bits(n, u);
                }
            }
        }
    }
    return r;
}

FrameAllocation decode_reduced(const ReducedFrame& r, std::span<const int> x,
                               const BitsMatrix& bits, int num_volte, int num_data,
                               int num_tti) {
    const int N = static_cast<int>(bits.rows());
    const int U = num_volte;
    FrameAllocation frame;
    frame.user_bits.assign(static_cast<std::size_t>(U + num_data), 0);
    for (int t = 0; t < num_tti; ++t) {
        auto alloc = TtiAllocation::empty(N, U, num_data);
        for (int n = 0; n < N; ++n) {
            alloc.owner[n] = r.best_data[n];
        }
        if (t < r.volte_ttis) {
            for (int u = 0; u < U; ++u) {
                if (int v = r.y_var[u * num_tti + t]; v >= 0 && x[v]) {
                    alloc.y[u] = 1;
                }
            }
            for (int n = 0; n < N; ++n) {
                for (int u = 0; u < U; ++u) {
                    if (int v = r.x_var[(t * N + n) * U + u]; v >= 0 && x[v]) {
                        alloc.owner[n] = u;
                    }
                }
                if (int v = r.d_var[t * N + n]; v >= 0 && !x[v] && alloc.owner[n] >= U) {
                    alloc.owner[n] = -1;
                }
            }
            detail::release_surplus(alloc, bits, U, num_data);
        }
        detail::tally(alloc, bits, U, num_data);
        for (int n = 0; n < N; ++n) {
            if (alloc.owner[n] >= 0) {
                frame.user_bits[alloc.owner[n]] += bits(n, alloc.owner[n]);
            }
        }
        frame.per_tti.push_back(std::move(alloc));
    }
    return frame;
}

// With U <= T each VoLTE user can have a TTI to itself. In any feasible plan the
// TTI serving u loses at least the data value of u's cheapest packet cover, and
// giving every user its own TTI with that cover attains the sum of these losses.
// The frame therefore splits into one small cover program per VoLTE user.
FrameOutcome schedule_frame_by_user(const BitsMatrix& bits, int num_volte, int num_data,
                                    int num_tti, const bip::SolveLimits& limits) {
    using Clock = std::chrono::steady_clock;
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(limits.time);
    const int N = static_cast<int>(bits.rows());
    const int U = num_volte;
    std::vector<int> best(static_cast<std::size_t>(N));
    double row_value = 0.0;
    for (int n = 0; n < N; ++n) {
        best[n] = detail::best_data_user(bits, n, U, num_data);
        row_value += best[n] >= 0 ? bits(n, best[n]) : 0;
    }

    FrameOutcome out;
    out.status = bip::SolveStatus::optimal;
    out.bound = num_tti * row_value;
    std::vector<std::vector<int>> covers(static_cast<std::size_t>(U));
    for (int u = 0; u < U; ++u) {
        std::vector<int> prbs;
        for (int n = 0; n < N; ++n) {
            if (bits(n, u) > 0) {
                prbs.push_back(n);
            }
        }
        bip::BinaryProgram p(static_cast<int>(prbs.size()));
        auto& row = p.add_ge(static_cast<double>(kVoltePacketBits));
        for (std::size_t i = 0; i < prbs.size(); ++i) {
            const int n = prbs[i];
            p.objective[i] = best[n] >= 0 ? -static_cast<double>(bits(n, best[n])) : 0.0;
            row.coeffs[i] = cover_bits(bits(n, u));
        }
        const std::vector<int> every_prb(prbs.size(), 1);
        const auto remaining = std::max(Clock::duration::zero(), deadline - Clock::now());
        const auto solved =
            bip::solve_branch_and_bound(p, bip::SolveLimits(remaining, limits.nodes), every_prb);
        out.nodes += solved.nodes;
        if (solved.status == bip::SolveStatus::infeasible) {
            out.status = bip::SolveStatus::infeasible;
            out.allocation.reset();
            return out;
        }
        if (solved.status == bip::SolveStatus::timeout) {
            out.status = bip::SolveStatus::timeout;
        }
        out.bound += solved.relaxation_bound;
        for (std::size_t i = 0; i < prbs.size(); ++i) {
            if (solved.assignment[i]) {
                covers[u].push_back(prbs[i]);
            }
        }
    }

    FrameAllocation frame;
    frame.user_bits.assign(static_cast<std::size_t>(U + num_data), 0);
    std::int64_t data = 0;
    for (int t = 0; t < num_tti; ++t) {
        auto alloc = TtiAllocation::empty(N, U, num_data);
        alloc.owner = best;
        if (t < U) {
            alloc.y[t] = 1;
            for (int n : covers[t]) {
                alloc.owner[n] = t;
            }
            detail::release_surplus(alloc, bits, U, num_data);
        }
        detail::tally(alloc, bits, U, num_data);
        for (int n = 0; n < N; ++n) {
            if (alloc.owner[n] >= 0) {
                frame.user_bits[alloc.owner[n]] += bits(n, alloc.owner[n]);
            }
        }
        data += alloc.total_data_bits();
        frame.per_tti.push_back(std::move(alloc));
    }
    out.objective = static_cast<double>(data);
    out.allocation = std::move(frame);
    return out;
}

}  // namespace

int FrameProgram::x_index(int prb, int user, int tti) const {
    return (tti * num_prb + prb) * (num_volte + num_data) + user;
}

int FrameProgram::y_index(int volte_user, int tti) const {
    return num_prb * (num_volte + num_data) * num_tti + tti * num_volte + volte_user;
}

FrameProgram build_frame_program(const BitsMatrix& bits, int num_volte, int num_data,
                                 int num_tti) {
    check_dimensions(bits, num_volte, num_data, num_tti);
    FrameProgram fp;
    fp.num_prb = static_cast<int>(bits.rows());
    fp.num_volte = num_volte;
    fp.num_data = num_data;
    fp.num_tti = num_tti;
    const int N = fp.num_prb;
    const int users = num_volte + num_data;
    const int vars = N * users * num_tti + num_volte * num_tti;

    bip::BinaryProgram& p = fp.program;
    p = bip::BinaryProgram(vars);
    p.var_labels.resize(static_cast<std::size_t>(vars));
    for (int t = 0; t < num_tti; ++t) {
        for (int n = 0; n < N; ++n) {
            for (int u = 0; u < users; ++u) {
                const int v = fp.x_index(n, u, t);
                p.var_labels[v] = "X[" + std::to_string(n) + "][" + std::to_string(u) + "][" +
                                  std::to_string(t) + "]";
                if (u >= num_volte) {
                    p.objective[v] = bits(n, u);
                }
            }
        }
        for (int u = 0; u < num_volte; ++u) {
            p.var_labels[fp.y_index(u, t)] =
                "Y[" + std::to_string(u) + "][" + std::to_string(t) + "]";
        }
    }
    // each PRB in each TTI goes to one user
    for (int t = 0; t < num_tti; ++t) {
        for (int n = 0; n < N; ++n) {
            std::vector<double> row(static_cast<std::size_t>(vars), 0.0);
            for (int u = 0; u < users; ++u) {
                row[fp.x_index(n, u, t)] = 1.0;
            }
            if (num_data > 0) {
                p.add_eq(1.0).coeffs = std::move(row);
            } else {
                p.add_le(std::move(row), 1.0);
            }
        }
    }
    // each VoLTE user is scheduled in exactly one TTI
    for (int u = 0; u < num_volte; ++u) {
        auto& row = p.add_eq(1.0);
        for (int t = 0; t < num_tti; ++t) {
            row.coeffs[fp.y_index(u, t)] = 1.0;
        }
    }
    // and then receives a whole packet
    for (int u = 0; u < num_volte; ++u) {
        for (int t = 0; t < num_tti; ++t) {
            auto& row = p.add_ge(0.0);
            for (int n = 0; n < N; ++n) {
                row.coeffs[fp.x_index(n, u, t)] = bits(n, u);
            }
            row.coeffs[fp.y_index(u, t)] = -static_cast<double>(kVoltePacketBits);
        }
    }
    return fp;
}

std::int64_t frame_solver_variables(int num_prb, int num_volte, int num_data, int num_tti) {
    if (num_volte <= num_tti) {
        return static_cast<std::int64_t>(num_volte) * num_prb;
    }
    std::int64_t pairs = 0;  // (u, t) with t <= u
    for (int u = 0; u < num_volte; ++u) {
        pairs += std::min(u + 1, num_tti);
    }
    const std::int64_t volte_ttis = std::min(num_volte, num_tti);
    return pairs * (num_prb + 1) + (num_data > 0 ? volte_ttis * num_prb : 0);
}

FrameOutcome schedule_frame_optimal(const BitsMatrix& bits, int num_volte, int num_data,
                                    int num_tti, const bip::SolveLimits& limits) {
    check_dimensions(bits, num_volte, num_data, num_tti);
    if (num_volte <= num_tti) {
        return schedule_frame_by_user(bits, num_volte, num_data, num_tti, limits);
    }
    const auto reduced = reduce_frame(bits, num_volte, num_data, num_tti, true);
    const auto solved = bip::solve_branch_and_bound(reduced.program, limits);

    FrameOutcome out;
    out.status = solved.status;
    out.nodes = solved.nodes;
    out.bound = solved.relaxation_bound + reduced.constant;
    if (!solved.has_assignment()) {
        return out;
    }
    out.allocation = decode_reduced(reduced, solved.assignment, bits, num_volte, num_data, num_tti);
    std::int64_t data = 0;
    for (const auto& tti : out.allocation->per_tti) {
        data += tti.total_data_bits();
    }
    out.objective = static_cast<double>(data);
    return out;
}

std::optional<double> schedule_frame_relaxed_bound(const BitsMatrix& bits, int num_volte,
                                                   int num_data, int num_tti) {
    check_dimensions(bits, num_volte, num_data, num_tti);
    // the collapsed program has the same LP optimum; no symmetry cuts here
    const auto reduced = reduce_frame(bits, num_volte, num_data, num_tti, false);
    const auto lp = bip::solve_lp_relaxation(reduced.program);
    if (lp.status == bip::LpStatus::infeasible) {
        return std::nullopt;
    }
    return lp.objective + reduced.constant;
}

}  // namespace volte
