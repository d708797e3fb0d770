#include <stdexcept>

#include "volte/sched.hpp"

namespace volte {

namespace {

void add_user_bits(FrameAllocation& frame, const TtiAllocation& alloc, const BitsMatrix& bits) {
    for (std::size_t n = 0; n < alloc.owner.size(); ++n) {
        if (const int u = alloc.owner[n]; u >= 0) {
            frame.user_bits[u] += bits(n, static_cast<std::size_t>(u));
        }
    }
}

}  // namespace

FrameRun run_frame(std::span<const BitsMatrix> bits, int num_volte, int num_data,
                   Policy policy, std::span<const double> pf_averages_in,
                   const FrameOptions& options) {
    if (bits.size() != 1 && bits.size() != static_cast<std::size_t>(kFrameTtis)) {
        throw std::invalid_argument("run_frame needs one bits matrix or one per TTI");
    }
    const auto users = static_cast<std::size_t>(num_volte + num_data);
    for (const auto& b : bits) {
        if (b.cols() != users || b.rows() != bits[0].rows()) {
            throw std::invalid_argument("bits matrices disagree with the user counts");
        }
    }
    const int N = static_cast<int>(bits[0].rows());
    auto bits_at = [&](int t) -> const BitsMatrix& { return bits.size() == 1 ? bits[0] : bits[t]; };

    const bip::SolveLimits limits(options.time_limit, options.node_limit);
    FrameRun run;
    run.state = SchedulerState::start_frame(num_volte, num_data, options.gamma, pf_averages_in);
    run.allocation.user_bits.assign(users, 0);

    if (policy == Policy::frame_optimal) {
        if (bits.size() != 1) {
            throw std::invalid_argument("frame-level optimum requires the channel held for the frame");
        }
        const auto outcome = schedule_frame_optimal(bits[0], num_volte, num_data, kFrameTtis,
                                                    limits);
        if (outcome.status == bip::SolveStatus::timeout) {
            ++run.solver_timeouts;
        }
        if (!outcome.allocation) {
            // no allocation at all: nothing is transmitted in this frame
            run.infeasible = outcome.status == bip::SolveStatus::infeasible;
            for (int t = 0; t < kFrameTtis; ++t) {
                auto empty = TtiAllocation::empty(N, num_volte, num_data);
                run.state.finish_tti(empty);
                run.allocation.per_tti.push_back(std::move(empty));
            }
            return run;
        }
        for (const auto& alloc : outcome.allocation->per_tti) {
            run.state.finish_tti(alloc);
        }
        run.allocation = *outcome.allocation;
        return run;
    }

    for (int t = 0; t < kFrameTtis; ++t) {
        const BitsMatrix& b = bits_at(t);
        TtiAllocation alloc;
        switch (policy) {
            case Policy::tti_optimal:
            case Policy::tti_optimal_pf: {
                const auto remaining = run.state.remaining_list();
                const auto selection = tti_select_volte(b, remaining, num_data, limits);
                if (selection.status == bip::SolveStatus::timeout) {
                    ++run.solver_timeouts;
                }
                std::vector<double> weights;
                if (policy == Policy::tti_optimal_pf) {
                    weights.reserve(static_cast<std::size_t>(num_data));
                    for (double a : run.state.pf_avg) {
                        weights.push_back(1.0 / a);
                    }
                }
                bip::SolveStatus status{};
                alloc = tti_allocate(b, selection.y, weights, limits, &status,
                                     selection.owner);
                if (status == bip::SolveStatus::timeout) {
                    ++run.solver_timeouts;
                }
                break;
            }
            case Policy::heuristic:
            case Policy::heuristic_pf:
            case Policy::baseline: {
                const HeuristicMode mode = policy == Policy::heuristic      ? HeuristicMode::max_throughput
                                           : policy == Policy::heuristic_pf ? HeuristicMode::pf
                                                                            : HeuristicMode::baseline;
                alloc = heuristic_tti(b, run.state, mode, {options.strict_pseudocode},
                                      &run.heuristic_ops);
                break;
            }
            case Policy::frame_optimal:
                break;
        }
        run.state.finish_tti(alloc);
        add_user_bits(run.allocation, alloc, b);
        run.allocation.per_tti.push_back(std::move(alloc));
    }
    return run;
}

}  // namespace volte
