#include "detail.hpp"

#include <algorithm>
#include <numeric>

#include "volte/ratemap.hpp"

namespace volte::detail {

int best_data_user(const BitsMatrix& bits, int prb, int num_volte, int num_data,
                   std::span<const double> weights) {
    int best = -1;
    double best_value = -1.0;
    for (int k = 0; k < num_data; ++k) {
        const double w = weights.empty() ? 1.0 : weights[k];
        const double value = w * bits(prb, num_volte + k);
        if (value > best_value) {
            best_value = value;
            best = num_volte + k;
        }
    }
    return best;
}

void release_surplus(TtiAllocation& alloc, const BitsMatrix& bits, int num_volte, int num_data,
                     std::span<const double> weights) {
    if (num_data == 0) {
        return;
    }
    const int prbs = static_cast<int>(alloc.owner.size());
    for (int u = 0; u < num_volte; ++u) {
        if (!alloc.y[u]) {
            // an unscheduled VoLTE user never keeps PRBs
            for (int n = 0; n < prbs; ++n) {
                if (alloc.owner[n] == u) {
                    alloc.owner[n] = best_data_user(bits, n, num_volte, num_data, weights);
                }
            }
            continue;
        }
        std::vector<int> held;
        std::int64_t total = 0;
        for (int n = 0; n < prbs; ++n) {
            if (alloc.owner[n] == u) {
                held.push_back(n);
                total += bits(n, u);
            }
        }
        std::stable_sort(held.begin(), held.end(),
                         [&](int a, int b) { return bits(a, u) < bits(b, u); });
        for (int n : held) {
            if (total - bits(n, u) >= kVoltePacketBits) {
                total -= bits(n, u);
                alloc.owner[n] = best_data_user(bits, n, num_volte, num_data, weights);
            }
        }
    }
}

void tally(TtiAllocation& alloc, const BitsMatrix& bits, int num_volte, int num_data) {
    alloc.data_bits.assign(static_cast<std::size_t>(num_data), 0);
    alloc.volte_served.clear();
    for (std::size_t n = 0; n < alloc.owner.size(); ++n) {
        const int u = alloc.owner[n];
        if (u >= num_volte) {
            alloc.data_bits[u - num_volte] += bits(n, static_cast<std::size_t>(u));
        }
    }
    for (int u = 0; u < num_volte; ++u) {
        if (alloc.y[u]) {
            alloc.volte_served.push_back(u);
        }
    }
}

}  // namespace volte::detail
