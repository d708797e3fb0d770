#include <algorithm>
#include <limits>
#include <stdexcept>

#include "volte/ratemap.hpp"
#include "volte/sched.hpp"

namespace volte {

TtiAllocation TtiAllocation::empty(int num_prb, int num_volte, int num_data) {
    TtiAllocation alloc;
    alloc.owner.assign(static_cast<std::size_t>(num_prb), -1);
    alloc.y.assign(static_cast<std::size_t>(num_volte), 0);
    alloc.data_bits.assign(static_cast<std::size_t>(num_data), 0);
    return alloc;
}

std::int64_t TtiAllocation::total_data_bits() const {
    std::int64_t total = 0;
    for (auto b : data_bits) {
        total += b;
    }
    return total;
}

std::int64_t TtiAllocation::bits_to(const BitsMatrix& bits, int user) const {
    std::int64_t total = 0;
    for (std::size_t n = 0; n < owner.size(); ++n) {
        if (owner[n] == user) {
            total += bits(n, static_cast<std::size_t>(user));
        }
    }
    return total;
}

SchedulerState SchedulerState::start_frame(int num_volte, int num_data, double gamma,
                                           std::span<const double> pf_averages) {
    if (num_volte < 0 || num_data < 0) {
        throw std::invalid_argument("user counts must be non-negative");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("gamma must lie in (0, 1)");
    }
    SchedulerState state;
    state.num_volte = num_volte;
    state.num_data = num_data;
    state.remaining_volte.assign(static_cast<std::size_t>(num_volte), 1);
    state.gamma = gamma;
    if (pf_averages.empty()) {
        state.pf_avg.assign(static_cast<std::size_t>(num_data), 1.0);
    } else {
        if (pf_averages.size() != static_cast<std::size_t>(num_data)) {
            throw std::invalid_argument("PF averages must have one entry per data user");
        }
        for (double a : pf_averages) {
            if (!(a > 0.0)) {
                throw std::invalid_argument("PF averages must be positive");
            }
        }
        state.pf_avg.assign(pf_averages.begin(), pf_averages.end());
    }
    state.last_rates.assign(static_cast<std::size_t>(num_data), 0);
    return state;
}

std::vector<int> SchedulerState::remaining_list() const {
    std::vector<int> list;
    for (int u = 0; u < num_volte; ++u) {
        if (remaining_volte[u]) {
            list.push_back(u);
        }
    }
    return list;
}

void SchedulerState::finish_tti(const TtiAllocation& alloc) {
    for (int u : alloc.volte_served) {
        if (!remaining_volte.at(static_cast<std::size_t>(u))) {
            throw std::logic_error("VoLTE user served twice in one frame");
        }
        remaining_volte[u] = 0;
    }
    c_volte += static_cast<std::int64_t>(kVoltePayloadBits) *
               static_cast<std::int64_t>(alloc.volte_served.size());
    c_data += alloc.total_data_bits();
    for (int k = 0; k < num_data; ++k) {
        const auto rate = alloc.data_bits[k];
        // an unscheduled user contributes a zero rate, which is the "otherwise" branch
        pf_avg[k] = gamma * pf_avg[k] + (1.0 - gamma) * static_cast<double>(rate);
        pf_avg[k] = std::max(pf_avg[k], std::numeric_limits<double>::min());
    }
    last_rates = alloc.data_bits;
}

std::string_view to_string(Policy policy) {
    switch (policy) {
        case Policy::frame_optimal:
            return "frame_optimal";
        case Policy::tti_optimal:
            return "tti_optimal";
        case Policy::tti_optimal_pf:
            return "tti_optimal_pf";
        case Policy::heuristic:
            return "heuristic";
        case Policy::heuristic_pf:
            return "heuristic_pf";
        case Policy::baseline:
            return "baseline";
    }
    return "unknown";
}

std::optional<Policy> parse_policy(std::string_view name) {
    for (auto p : {Policy::frame_optimal, Policy::tti_optimal, Policy::tti_optimal_pf,
                   Policy::heuristic, Policy::heuristic_pf, Policy::baseline}) {
        if (to_string(p) == name) {
            return p;
        }
    }
    return std::nullopt;
}

void write_frame_csv(std::ostream& out, const FrameAllocation& frame,
                     std::span<const BitsMatrix> bits) {
    out << "tti,prb,user,bits\n";
    for (std::size_t t = 0; t < frame.per_tti.size(); ++t) {
        const auto& b = bits.size() == 1 ? bits[0] : bits[t];
        const auto& alloc = frame.per_tti[t];
        for (std::size_t n = 0; n < alloc.owner.size(); ++n) {
            const int u = alloc.owner[n];
            if (u < 0) {
                continue;
            }
            out << t << ',' << n << ',' << u << ',' << b(n, static_cast<std::size_t>(u)) << '\n';
        }
    }
}

}  // namespace volte
