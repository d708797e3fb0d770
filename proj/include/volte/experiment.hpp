#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "volte/metrics.hpp"
#include "volte/sched.hpp"

namespace volte {

/// Invalid configuration: unknown key, malformed value or out-of-domain parameter.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An exact policy would be asked to solve programs beyond the configured cap.
class SizeCapError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    double bandwidth_mhz = 3.0;
    int num_prb = 15;                     // follows bandwidth_mhz
    int num_data = 5;
    std::vector<int> volte_sweep{0, 2, 4, 6, 8, 10};
    std::vector<Policy> policies{Policy::heuristic};
    int runs = 30;
    int frames_per_run = 1;
    std::uint64_t seed = 1;
    double gamma = 0.9;
    bool strict_pseudocode = false;
    bool per_tti_fading = false;          // independent fading per TTI (no frame_optimal)
    double cell_radius_m = 288.0;
    double pathloss_exponent = 3.8;
    double tx_power_dbm = 46.0;
    double noise_power_dbm = -110.0;
    double etu_last_tap_db = -7.0;
    std::int64_t frame_var_cap = 2000;
    std::int64_t tti_var_cap = 600;
    double solver_time_limit_s = 60.0;    // per solver call; a safety net, not deterministic
    std::int64_t solver_node_limit = 20000;  // per solver call; deterministic, 0 = none
    int threads = 1;
};

/// PRBs per TTI for 1.4, 3 and 10 MHz; ConfigError otherwise.
int prbs_for_bandwidth(double bandwidth_mhz);

/// Sets one key; `value` is the raw text. Throws ConfigError for unknown keys or
/// malformed values. Lists are comma separated; the sweep also accepts a:b:step.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Flat `key = value` lines; `#` starts a comment. Throws ConfigError with the line number.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig base = {});

/// Domain checks (bandwidth, positive counts, gamma in (0,1), ...). Throws ConfigError.
void validate(const ExperimentConfig& cfg);

/// Throws SizeCapError naming the cap when an exact policy exceeds it anywhere in the sweep.
void check_size_caps(const ExperimentConfig& cfg);

/// splitmix64 folded over (base seed, stream, run index).
std::uint64_t derive_seed(std::uint64_t seed, int stream, int run);

/// Seed identifying run `run` (its VoLTE stream); reported in the run CSV.
std::uint64_t run_seed(std::uint64_t seed, int run);

/// Bits matrices of run `run` at U VoLTE users: one entry per frame, each holding
/// one matrix (block fading) or one per TTI. The channel every policy sees.
/// VoLTE users are placed and faded from run_seed(seed, run) = derive_seed(seed, -2, run),
/// data users from derive_seed(seed, -1, run). Draws go user by user, so a sweep's
/// populations are nested: raising U only appends VoLTE users.
std::vector<std::vector<BitsMatrix>> run_channel(const ExperimentConfig& cfg, int num_volte,
                                                 int run);

struct RunRecord {
    Policy policy{};
    int num_volte = 0;
    int run = 0;
    std::uint64_t seed = 0;
    RunMetrics metrics;
    std::int64_t solver_timeouts = 0;
};

/// Every (policy, U, run), sorted by policy (config order), U (sweep order), run.
/// All policies of one (U, run) see the same topology and fading. Deterministic for
/// any thread count.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

/// One run record per line, kbps figures with fixed decimals; an empty outage cell
/// when U = 0.
void write_runs_csv(std::ostream& out, const ExperimentConfig& cfg,
                    const std::vector<RunRecord>& records);

inline constexpr std::string_view kRunsCsvHeader =
    "policy,bandwidth_mhz,N,U,K,seed,volte_kbps,data_kbps,total_kbps,jain,outage,infeasible";

/// throughput, outage, fairness, infeasibility.
const std::vector<std::string>& plot_families();

/// Groups the per-run CSV by (policy, bandwidth, N, U, K) and writes the family's
/// means and sample standard deviations. Throws std::invalid_argument for an unknown
/// family or a malformed CSV.
void emit_plotdata(std::istream& runs_csv, std::string_view family, std::ostream& out);

}  // namespace volte
