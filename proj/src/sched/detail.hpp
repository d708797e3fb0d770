#pragma once

#include <span>

#include "volte/sched.hpp"

namespace volte::detail {

/// Data user (as user id) maximizing w_k * B[n][U+k]; lowest index on ties; -1 if K = 0.
/// Empty weights mean unit weights.
int best_data_user(const BitsMatrix& bits, int prb, int num_volte, int num_data,
                   std::span<const double> weights = {});

/// Hands PRBs a served VoLTE user does not need (its packet still fits without them)
/// to the best data user, smallest-bits PRBs first.
void release_surplus(TtiAllocation& alloc, const BitsMatrix& bits, int num_volte, int num_data,
                     std::span<const double> weights = {});

/// Fills data_bits and volte_served from owner and y.
void tally(TtiAllocation& alloc, const BitsMatrix& bits, int num_volte, int num_data);

}  // namespace volte::detail
