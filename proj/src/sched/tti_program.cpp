#include <algorithm>
#include <stdexcept>
#include <string>

#include "detail.hpp"
#include "volte/ratemap.hpp"
#include "volte/sched.hpp"

namespace volte {

namespace {

// A PRB never needs to contribute more than one packet to a cover row, so
// capping its bits at the packet size leaves the integer points unchanged and
// tightens the relaxation.
double cover_bits(int bits) {
    return std::min(bits, kVoltePacketBits);
}

}  // namespace

std::int64_t tti_solver_variables(int num_prb, int num_volte, int num_data) {
    return static_cast<std::int64_t>(num_volte) * (num_prb + 1) + (num_data > 0 ? num_prb : 0);
}

VolteSelection tti_select_volte(const BitsMatrix& bits, std::span<const int> remaining,
                                int num_data, const bip::SolveLimits& limits) {
    const int N = static_cast<int>(bits.rows());
    const int U = static_cast<int>(bits.cols()) - num_data;
    if (U < 0) {
        throw std::invalid_argument("bits matrix narrower than the data-user count");
    }
    VolteSelection out;
    out.y.assign(static_cast<std::size_t>(U), 0);
    if (remaining.empty()) {
        return out;
    }

    // Y_u then X[n][u] for PRBs with nonzero bits. Data users only absorb leftover
    // PRBs here, so the PRB rows read sum_u X[n][u] <= 1 over VoLTE users.
    std::vector<int> y_var(remaining.size());
    std::vector<std::vector<std::pair<int, int>>> x_vars(remaining.size());  // (prb, var)
    int count = 0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        const int u = remaining[i];
        if (u < 0 || u >= U) {
            throw std::out_of_range("remaining VoLTE user id out of range");
        }
        y_var[i] = count++;
        for (int n = 0; n < N; ++n) {
            if (bits(n, u) > 0) {
                x_vars[i].emplace_back(n, count++);
            }
        }
    }
    bip::BinaryProgram p(count);
    for (int v : y_var) {
        p.objective[v] = 1.0;
    }
    for (int n = 0; n < N; ++n) {
        std::vector<double> row(static_cast<std::size_t>(count), 0.0);
        bool any = false;
        for (const auto& vars : x_vars) {
            for (const auto& [prb, v] : vars) {
                if (prb == n) {
                    row[v] = 1.0;
                    any = true;
                }
            }
        }
        if (any) {
            p.add_le(std::move(row), 1.0);
        }
    }
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        auto& row = p.add_ge(0.0);
        row.coeffs[y_var[i]] = -static_cast<double>(kVoltePacketBits);
        for (const auto& [prb, v] : x_vars[i]) {
            row.coeffs[v] = cover_bits(bits(prb, remaining[i]));
        }
    }

    // The greedy bundle scan gives a feasible starting incumbent.
    auto state = SchedulerState::start_frame(U, num_data, 0.5, {});
    std::fill(state.remaining_volte.begin(), state.remaining_volte.end(), 0);
    for (int u : remaining) {
        state.remaining_volte[u] = 1;
    }
    const auto greedy = heuristic_tti(bits, state, HeuristicMode::max_throughput);
    std::vector<int> hint(static_cast<std::size_t>(count), 0);
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        if (!greedy.y[remaining[i]]) {
            continue;
        }
        hint[y_var[i]] = 1;
        for (const auto& [prb, v] : x_vars[i]) {
            hint[v] = greedy.owner[prb] == remaining[i] ? 1 : 0;
        }
    }

    const auto solved = bip::solve_branch_and_bound(p, limits, hint);
    out.status = solved.status;
    out.nodes = solved.nodes;
    out.owner.assign(static_cast<std::size_t>(N), -1);
    if (solved.has_assignment()) {
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            if (!solved.assignment[y_var[i]]) {
                continue;
            }
            out.y[remaining[i]] = 1;
            for (const auto& [prb, v] : x_vars[i]) {
                if (solved.assignment[v]) {
                    out.owner[prb] = remaining[i];
                }
            }
        }
    }
    return out;
}

TtiAllocation tti_allocate(const BitsMatrix& bits, std::span<const int> y,
                           std::span<const double> weights,
                           const bip::SolveLimits& limits, bip::SolveStatus* status,
                           std::span<const int> warm_owner) {
    const int N = static_cast<int>(bits.rows());
    const int U = static_cast<int>(y.size());
    const int K = static_cast<int>(bits.cols()) - U;
    if (K < 0) {
        throw std::invalid_argument("selection longer than the user count");
    }
    if (!weights.empty() && weights.size() != static_cast<std::size_t>(K)) {
        throw std::invalid_argument("one weight per data user required");
    }
    for (double w : weights) {
        if (!(w > 0.0)) {
            throw std::invalid_argument("data-user weights must be positive");
        }
    }

    // Rescale so the largest weight is 1; argmax and optimum are unchanged.
    std::vector<double> w(weights.begin(), weights.end());
    if (!w.empty()) {
        const double top = *std::max_element(w.begin(), w.end());
        for (auto& v : w) {
            v /= top;
        }
    }

    std::vector<int> best(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        best[n] = detail::best_data_user(bits, n, U, K, w);
    }

    std::vector<int> scheduled;
    for (int u = 0; u < U; ++u) {
        if (y[u]) {
            scheduled.push_back(u);
        }
    }

    // X[n][u] for scheduled VoLTE users on nonzero-bit PRBs, D[n] for the best data user.
    std::vector<std::vector<std::pair<int, int>>> x_vars(scheduled.size());
    std::vector<int> d_var(static_cast<std::size_t>(N), -1);
    int count = 0;
    for (std::size_t i = 0; i < scheduled.size(); ++i) {
        for (int n = 0; n < N; ++n) {
            if (bits(n, scheduled[i]) > 0) {
                x_vars[i].emplace_back(n, count++);
            }
        }
    }
    for (int n = 0; n < N; ++n) {
        if (best[n] >= 0) {
            d_var[n] = count++;
        }
    }
    bip::BinaryProgram p(count);
    for (int n = 0; n < N; ++n) {
        if (d_var[n] >= 0) {
            const double weight = w.empty() ? 1.0 : w[best[n] - U];
            p.objective[d_var[n]] = weight * bits(n, best[n]);
        }
    }
    for (int n = 0; n < N; ++n) {
        std::vector<double> row(static_cast<std::size_t>(count), 0.0);
        bool any = false;
        for (const auto& vars : x_vars) {
            for (const auto& [prb, v] : vars) {
                if (prb == n) {
                    row[v] = 1.0;
                    any = true;
                }
            }
        }
        if (d_var[n] >= 0) {
            row[d_var[n]] = 1.0;
            p.add_eq(1.0).coeffs = std::move(row);
        } else if (any) {
            p.add_le(std::move(row), 1.0);
        }
    }
    for (std::size_t i = 0; i < scheduled.size(); ++i) {
        auto& row = p.add_ge(static_cast<double>(kVoltePacketBits));
        for (const auto& [prb, v] : x_vars[i]) {
            row.coeffs[v] = cover_bits(bits(prb, scheduled[i]));
        }
    }

    std::vector<int> hint;
    if (warm_owner.size() == static_cast<std::size_t>(N)) {
        hint.assign(static_cast<std::size_t>(count), 0);
        for (std::size_t i = 0; i < scheduled.size(); ++i) {
            for (const auto& [prb, v] : x_vars[i]) {
                hint[v] = warm_owner[prb] == scheduled[i] ? 1 : 0;
            }
        }
        for (int n = 0; n < N; ++n) {
            if (d_var[n] >= 0) {
                hint[d_var[n]] = warm_owner[n] < 0 ? 1 : 0;
            }
        }
    }

    const auto solved = bip::solve_branch_and_bound(p, limits, hint);
    if (status != nullptr) {
        *status = solved.status;
    }
    if (solved.status == bip::SolveStatus::infeasible) {
        throw PhaseContractError("phase-2 program infeasible for a phase-1 selection");
    }
    auto alloc = TtiAllocation::empty(N, U, K);
    if (!solved.has_assignment()) {
        // timed out before any incumbent: serve nobody, data takes the band
        for (int n = 0; n < N; ++n) {
            alloc.owner[n] = best[n];
        }
        detail::tally(alloc, bits, U, K);
        return alloc;
    }
    for (int u : scheduled) {
        alloc.y[u] = 1;
    }
    for (std::size_t i = 0; i < scheduled.size(); ++i) {
        for (const auto& [prb, v] : x_vars[i]) {
            if (solved.assignment[v]) {
                alloc.owner[prb] = scheduled[i];
            }
        }
    }
    for (int n = 0; n < N; ++n) {
        if (d_var[n] >= 0 && solved.assignment[d_var[n]]) {
            alloc.owner[n] = best[n];
        }
    }
    detail::release_surplus(alloc, bits, U, K, w);
    detail::tally(alloc, bits, U, K);
    return alloc;
}

}  // namespace volte
