#include <stdexcept>

#include "detail.hpp"
#include "volte/ratemap.hpp"
#include "volte/sched.hpp"

namespace volte {

TtiAllocation heuristic_tti(const BitsMatrix& bits, const SchedulerState& state,
                            HeuristicMode mode, HeuristicOptions options, std::int64_t* ops) {
    const int N = static_cast<int>(bits.rows());
    const int U = state.num_volte;
    const int K = state.num_data;
    if (bits.cols() != static_cast<std::size_t>(U + K)) {
        throw std::invalid_argument("bits matrix does not match the scheduler state");
    }
    std::int64_t count = 0;
    auto alloc = TtiAllocation::empty(N, U, K);
    std::vector<int> pending = state.remaining_list();

    auto pick_data_user = [&](int n) {
        count += K;
        int best = -1;
        double best_value = -1.0;
        for (int k = 0; k < K; ++k) {
            const double b = bits(n, U + k);
            const double value = mode == HeuristicMode::pf ? b / state.pf_avg[k] : b;
            if (value > best_value) {
                best_value = value;
                best = U + k;
            }
        }
        return best;
    };

    int n = 0;
    while (n < N) {
        if (!pending.empty()) {
            std::size_t best_slot = 0;
            for (std::size_t i = 1; i < pending.size(); ++i) {
                if (bits(n, pending[i]) > bits(n, pending[best_slot])) {
                    best_slot = i;
                }
            }
            count += static_cast<std::int64_t>(pending.size());
            const int u = pending[best_slot];

            std::int64_t bundle_bits = bits(n, u);
            int bundle = 1;
            bool serve;
            if (options.strict_pseudocode) {
                while (bundle_bits <= kVoltePacketBits && n + bundle < N) {
                    bundle_bits += bits(n + bundle, u);
                    ++bundle;
                    ++count;
                }
                serve = n + bundle < N;
            } else {
                while (bundle_bits < kVoltePacketBits && n + bundle < N) {
                    bundle_bits += bits(n + bundle, u);
                    ++bundle;
                    ++count;
                }
                serve = bundle_bits >= kVoltePacketBits;
            }

            if (serve) {
                for (int i = 0; i < bundle; ++i) {
                    alloc.owner[n + i] = u;
                }
                alloc.y[u] = 1;
                pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best_slot));
                n += bundle;
                continue;
            }
            // strict priority never hands a PRB to data while VoLTE users wait
            if (mode == HeuristicMode::baseline) {
                ++n;
                continue;
            }
        }
        alloc.owner[n] = pick_data_user(n);
        ++n;
    }

    detail::tally(alloc, bits, U, K);
    if (ops != nullptr) {
        *ops += count;
    }
    return alloc;
}

}  // namespace volte
