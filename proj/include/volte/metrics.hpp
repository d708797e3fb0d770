#pragma once

#include <span>
#include <vector>

#include "volte/sched.hpp"

namespace volte {

/// A 20 ms frame carrying b bits is b / 20 ms = 0.05 * b kbit/s.
inline constexpr double kKbpsPerBitPerFrame = 0.05;

/// (sum x)^2 / (K * sum x^2); 1 when every rate is zero. Throws on empty input or
/// negative/non-finite rates.
double jain_index(std::span<const double> rates);

/// Mean over frames of the fraction of the U VoLTE users left unserved. Throws for
/// U < 1 or an empty frame list.
double outage_probability(std::span<const FrameAllocation> frames, int num_volte);

/// VoLTE users served across a frame.
int served_volte(const FrameAllocation& frame);

struct RunMetrics {
    double volte_bits_per_frame = 0.0;  // 253 payload bits per served user
    double data_bits_per_frame = 0.0;
    double total_bits_per_frame = 0.0;
    double jain = 1.0;                  // over whole-run per-data-user totals
    double outage = 0.0;                // NaN when the run has no VoLTE users
    double infeasible = 0.0;            // fraction of frames with no feasible plan
};

/// Metrics of one simulation run from its frames (one FrameRun per frame, PF
/// averages carried between them).
RunMetrics run_metrics(std::span<const FrameRun> frames, int num_volte, int num_data);

struct MetricsSummary {
    RunMetrics mean;
    RunMetrics stddev;  // sample standard deviation; zero for a single run
    int runs = 0;
};

/// Unweighted per-field means and sample standard deviations. NaN fields stay NaN.
/// Throws on an empty list.
MetricsSummary aggregate_runs(std::span<const RunMetrics> runs);

}  // namespace volte
