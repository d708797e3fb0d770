#include "volte/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace volte {

double jain_index(std::span<const double> rates) {
    if (rates.empty()) {
        throw std::invalid_argument("Jain index needs at least one rate");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double x : rates) {
        if (!std::isfinite(x) || x < 0.0) {
            throw std::invalid_argument("Jain index needs finite nonnegative rates");
        }
        sum += x;
        sum_sq += x * x;
    }
    if (sum_sq == 0.0) {
        return 1.0;
    }
    return sum * sum / (static_cast<double>(rates.size()) * sum_sq);
}

int served_volte(const FrameAllocation& frame) {
    int served = 0;
    for (const auto& tti : frame.per_tti) {
        served += static_cast<int>(tti.volte_served.size());
    }
    return served;
}

double outage_probability(std::span<const FrameAllocation> frames, int num_volte) {
    if (num_volte < 1) {
        throw std::invalid_argument("outage is undefined without VoLTE users");
    }
    if (frames.empty()) {
        throw std::invalid_argument("outage needs at least one frame");
    }
    double total = 0.0;
    for (const auto& frame : frames) {
        total += static_cast<double>(num_volte - served_volte(frame)) / num_volte;
    }
    return total / static_cast<double>(frames.size());
}

RunMetrics run_metrics(std::span<const FrameRun> frames, int num_volte, int num_data) {
    if (frames.empty()) {
        throw std::invalid_argument("run metrics need at least one frame");
    }
    RunMetrics m;
    std::vector<double> data_totals(static_cast<std::size_t>(num_data), 0.0);
    std::vector<FrameAllocation> allocations;
    allocations.reserve(frames.size());
    int infeasible = 0;
    for (const auto& run : frames) {
        m.volte_bits_per_frame += static_cast<double>(run.state.c_volte);
        m.data_bits_per_frame += static_cast<double>(run.state.c_data);
        for (int k = 0; k < num_data; ++k) {
            data_totals[k] += static_cast<double>(run.allocation.user_bits.at(num_volte + k));
        }
        infeasible += run.infeasible ? 1 : 0;
        allocations.push_back(run.allocation);
    }
    const auto count = static_cast<double>(frames.size());
    m.volte_bits_per_frame /= count;
    m.data_bits_per_frame /= count;
    m.total_bits_per_frame = m.volte_bits_per_frame + m.data_bits_per_frame;
    m.jain = num_data > 0 ? jain_index(data_totals) : 1.0;
    m.outage = num_volte > 0 ? outage_probability(allocations, num_volte) : std::nan("");
    m.infeasible = infeasible / count;
    return m;
}

MetricsSummary aggregate_runs(std::span<const RunMetrics> runs) {
    if (runs.empty()) {
        throw std::invalid_argument("aggregate needs at least one run");
    }
    MetricsSummary s;
    s.runs = static_cast<int>(runs.size());
    const double n = static_cast<double>(runs.size());
    auto field = [&](double RunMetrics::*f) {
        double mean = 0.0;
        for (const auto& r : runs) {
            mean += r.*f;
        }
        mean /= n;
        double ss = 0.0;
        for (const auto& r : runs) {
            ss += (r.*f - mean) * (r.*f - mean);
        }
        s.mean.*f = mean;
        s.stddev.*f = runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : (std::isnan(mean) ? mean : 0.0);
    };
    field(&RunMetrics::volte_bits_per_frame);
    field(&RunMetrics::data_bits_per_frame);
    field(&RunMetrics::total_bits_per_frame);
    field(&RunMetrics::jain);
    field(&RunMetrics::outage);
    field(&RunMetrics::infeasible);
    return s;
}

}  // namespace volte
