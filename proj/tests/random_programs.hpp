#pragma once

#include <random>

#include "volte/bip.hpp"
#include "volte/channel.hpp"

namespace volte::testing {

// Small integer programs mixing assignment-style equalities with knapsack-style
// covers; roughly a third come out infeasible.
inline bip::BinaryProgram random_program(std::mt19937_64& rng, int max_vars) {
    std::uniform_int_distribution<int> var_count(1, max_vars);
    const int n = var_count(rng);
    bip::BinaryProgram p(n);
    std::uniform_int_distribution<int> obj(-4, 20);
    for (auto& c : p.objective) {
        c = obj(rng);
    }
    std::uniform_int_distribution<int> coin(0, 3);
    std::uniform_int_distribution<int> row_count(0, 3);
    const int eqs = row_count(rng);
    for (int r = 0; r < eqs; ++r) {
        auto& row = p.add_eq(0.0);
        int ones = 0;
        for (auto& a : row.coeffs) {
            if (coin(rng) == 0) {
                a = 1.0;
                ++ones;
            }
        }
        std::uniform_int_distribution<int> rhs(0, std::max(1, ones));
        row.rhs = std::min(rhs(rng), 2);
    }
    const int ges = row_count(rng);
    std::uniform_int_distribution<int> weight(-2, 9);
    for (int r = 0; r < ges; ++r) {
        auto& row = p.add_ge(0.0);
        double positive = 0.0;
        for (auto& a : row.coeffs) {
            if (coin(rng) != 0) {
                a = weight(rng);
                positive += std::max(a, 0.0);
            }
        }
        std::uniform_real_distribution<double> frac(0.0, 0.9);
        row.rhs = std::floor(frac(rng) * positive);
    }
    return p;
}

// Bits drawn from the CQI image so instances look like real channel snapshots.
inline BitsMatrix random_bits(std::mt19937_64& rng, int prbs, int users) {
    static constexpr int kImage[] = {0, 18, 28, 45, 72, 105, 141, 177, 229, 288, 327, 398, 468, 542, 613, 666};
    std::uniform_int_distribution<int> cqi(0, 15);
    BitsMatrix b(static_cast<std::size_t>(prbs), static_cast<std::size_t>(users));
    for (int n = 0; n < prbs; ++n) {
        for (int u = 0; u < users; ++u) {
            b(n, u) = kImage[cqi(rng)];
        }
    }
    return b;
}

}  // namespace volte::testing
