#include "volte/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "volte/channel.hpp"

namespace volte {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ConfigError("bad value '" + std::string(text) + "' for " + std::string(key));
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "1" || text == "true" || text == "yes" || text == "on") {
        return true;
    }
    if (text == "0" || text == "false" || text == "no" || text == "off") {
        return false;
    }
    throw ConfigError("bad boolean '" + std::string(text) + "' for " + std::string(key));
}

std::vector<int> parse_sweep(std::string_view key, std::string_view text) {
    std::vector<int> sweep;
    for (auto item : split(text, ',')) {
        const auto range = split(item, ':');
        if (range.size() == 1) {
            sweep.push_back(parse_number<int>(key, item));
        } else if (range.size() == 3) {
            const int from = parse_number<int>(key, range[0]);
            const int to = parse_number<int>(key, range[1]);
            const int step = parse_number<int>(key, range[2]);
            if (step <= 0 || to < from) {
                throw ConfigError("bad range '" + std::string(item) + "' for " + std::string(key));
            }
            for (int u = from; u <= to; u += step) {
                sweep.push_back(u);
            }
        } else {
            throw ConfigError("bad sweep item '" + std::string(item) + "'");
        }
    }
    return sweep;
}

std::vector<Policy> parse_policies(std::string_view text) {
    std::vector<Policy> policies;
    for (auto item : split(text, ',')) {
        const auto policy = parse_policy(item);
        if (!policy) {
            throw ConfigError("unknown policy '" + std::string(item) + "'");
        }
        policies.push_back(*policy);
    }
    return policies;
}

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool is_exact_frame(Policy p) { return p == Policy::frame_optimal; }
bool is_exact_tti(Policy p) { return p == Policy::tti_optimal || p == Policy::tti_optimal_pf; }

// Users are drawn from streams that ignore U, and placement and fading are drawn
// user by user, so the first U VoLTE users and all data users are the same at
// every point of a sweep: larger U only adds VoLTE users.
constexpr int kDataStream = -1;
constexpr int kVolteStream = -2;

Grid<double> stack_rows(const Grid<double>& top, const Grid<double>& bottom) {
    Grid<double> out(top.rows() + bottom.rows(), std::max(top.cols(), bottom.cols()));
    for (std::size_t r = 0; r < top.rows(); ++r) {
        std::copy(top.row(r).begin(), top.row(r).end(), out.row(r).begin());
    }
    for (std::size_t r = 0; r < bottom.rows(); ++r) {
        std::copy(bottom.row(r).begin(), bottom.row(r).end(), out.row(top.rows() + r).begin());
    }
    return out;
}

// Bits matrices of every frame of one run, shared by all policies.
std::vector<std::vector<BitsMatrix>> draw_run_channel(const ExperimentConfig& cfg,
                                                      const FadingGenerator& fading,
                                                      int num_volte, int run) {
    const std::uint64_t volte_seed = run_seed(cfg.seed, run);
    const std::uint64_t data_seed = derive_seed(cfg.seed, kDataStream, run);
    auto topology = build_topology(volte_seed, num_volte, 0, cfg.cell_radius_m,
                                   cfg.pathloss_exponent);
    const auto data_users = build_topology(data_seed, 0, cfg.num_data, cfg.cell_radius_m,
                                           cfg.pathloss_exponent);
    topology.users.insert(topology.users.end(), data_users.users.begin(), data_users.users.end());

    const RadioParams radio{cfg.tx_power_dbm, cfg.noise_power_dbm};
    const int draws_per_frame = cfg.per_tti_fading ? kFrameTtis : 1;
    std::vector<std::vector<BitsMatrix>> frames;
    for (int f = 0; f < cfg.frames_per_run; ++f) {
        std::vector<BitsMatrix> bits;
        for (int t = 0; t < draws_per_frame; ++t) {
            // each population's seed folded with (frame, draw) by the same mixer
            const auto volte = draw_channel_gains(derive_seed(volte_seed, f, t), fading, num_volte);
            const auto data = draw_channel_gains(derive_seed(data_seed, f, t), fading, cfg.num_data);
            const ChannelGains gains{stack_rows(volte.serving, data.serving),
                                     stack_rows(volte.interfering, data.interfering)};
            bits.push_back(bits_matrix(compute_sinr_matrix(topology, gains, radio)));
        }
        frames.push_back(std::move(bits));
    }
    return frames;
}

std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

}  // namespace

int prbs_for_bandwidth(double bandwidth_mhz) {
    struct Entry {
        double mhz;
        int prbs;
    };
    static constexpr Entry table[] = {{1.4, 7}, {3.0, 15}, {10.0, 50}};
    for (const auto& e : table) {
        if (std::abs(bandwidth_mhz - e.mhz) < 1e-9) {
            return e.prbs;
        }
    }
    throw ConfigError("bandwidth must be 1.4, 3 or 10 MHz, got " +
                      format_double("%g", bandwidth_mhz));
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "bandwidth") {
        cfg.bandwidth_mhz = parse_number<double>(key, value);
        cfg.num_prb = prbs_for_bandwidth(cfg.bandwidth_mhz);
    } else if (key == "num_data") {
        cfg.num_data = parse_number<int>(key, value);
    } else if (key == "volte_sweep") {
        cfg.volte_sweep = parse_sweep(key, value);
    } else if (key == "policy" || key == "policies") {
        cfg.policies = parse_policies(value);
    } else if (key == "runs") {
        cfg.runs = parse_number<int>(key, value);
    } else if (key == "frames_per_run") {
        cfg.frames_per_run = parse_number<int>(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "gamma") {
        cfg.gamma = parse_number<double>(key, value);
    } else if (key == "strict_pseudocode") {
        cfg.strict_pseudocode = parse_bool(key, value);
    } else if (key == "per_tti_fading") {
        cfg.per_tti_fading = parse_bool(key, value);
    } else if (key == "cell_radius") {
        cfg.cell_radius_m = parse_number<double>(key, value);
    } else if (key == "pathloss_exponent") {
        cfg.pathloss_exponent = parse_number<double>(key, value);
    } else if (key == "tx_power_dbm") {
        cfg.tx_power_dbm = parse_number<double>(key, value);
    } else if (key == "noise_power_dbm") {
        cfg.noise_power_dbm = parse_number<double>(key, value);
    } else if (key == "etu_last_tap_db") {
        cfg.etu_last_tap_db = parse_number<double>(key, value);
    } else if (key == "frame_var_cap") {
        cfg.frame_var_cap = parse_number<std::int64_t>(key, value);
    } else if (key == "tti_var_cap") {
        cfg.tti_var_cap = parse_number<std::int64_t>(key, value);
    } else if (key == "time_limit") {
        cfg.solver_time_limit_s = parse_number<double>(key, value);
    } else if (key == "node_limit") {
        cfg.solver_node_limit = parse_number<std::int64_t>(key, value);
    } else if (key == "threads") {
        cfg.threads = parse_number<int>(key, value);
    } else {
        throw ConfigError("unknown key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        try {
            apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    return parse_config(in, std::move(base));
}

void validate(const ExperimentConfig& cfg) {
    if (prbs_for_bandwidth(cfg.bandwidth_mhz) != cfg.num_prb) {
        throw ConfigError("PRB count does not match the bandwidth");
    }
    if (cfg.num_data < 0) {
        throw ConfigError("num_data must be >= 0");
    }
    if (cfg.volte_sweep.empty()) {
        throw ConfigError("volte_sweep is empty");
    }
    for (int u : cfg.volte_sweep) {
        if (u < 0) {
            throw ConfigError("volte_sweep entries must be >= 0");
        }
    }
    if (cfg.policies.empty()) {
        throw ConfigError("no policy selected");
    }
    if (cfg.runs < 1 || cfg.frames_per_run < 1 || cfg.threads < 1) {
        throw ConfigError("runs, frames_per_run and threads must be positive");
    }
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) {
        throw ConfigError("gamma must lie in (0, 1)");
    }
    if (!(cfg.cell_radius_m > 0.0) || !(cfg.pathloss_exponent > 2.0)) {
        throw ConfigError("cell_radius must be positive and pathloss_exponent above 2");
    }
    if (!std::isfinite(cfg.tx_power_dbm) || !std::isfinite(cfg.noise_power_dbm) ||
        !std::isfinite(cfg.etu_last_tap_db)) {
        throw ConfigError("radio parameters must be finite");
    }
    if (cfg.frame_var_cap < 1 || cfg.tti_var_cap < 1 || !(cfg.solver_time_limit_s > 0.0) ||
        cfg.solver_node_limit < 0) {
        throw ConfigError("caps and time_limit must be positive, node_limit >= 0");
    }
    if (cfg.per_tti_fading &&
        std::find(cfg.policies.begin(), cfg.policies.end(), Policy::frame_optimal) !=
            cfg.policies.end()) {
        throw ConfigError("frame_optimal needs the channel held for the frame (per_tti_fading off)");
    }
}

void check_size_caps(const ExperimentConfig& cfg) {
    for (Policy policy : cfg.policies) {
        for (int u : cfg.volte_sweep) {
            std::int64_t vars = 0;
            std::int64_t cap = 0;
            const char* cap_name = nullptr;
            if (is_exact_frame(policy)) {
                vars = frame_solver_variables(cfg.num_prb, u, cfg.num_data);
                cap = cfg.frame_var_cap;
                cap_name = "frame_var_cap";
            } else if (is_exact_tti(policy)) {
                vars = tti_solver_variables(cfg.num_prb, u, cfg.num_data);
                cap = cfg.tti_var_cap;
                cap_name = "tti_var_cap";
            } else {
                continue;
            }
            if (vars > cap) {
                throw SizeCapError(std::string(to_string(policy)) + " at U=" + std::to_string(u) +
                                   " needs " + std::to_string(vars) +
                                   " binary variables, above " + cap_name + "=" +
                                   std::to_string(cap));
            }
        }
    }
}

std::uint64_t derive_seed(std::uint64_t seed, int stream, int run) {
    std::uint64_t h = mix(seed);
    h = mix(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(stream)));
    return mix(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(run)));
}

std::vector<std::vector<BitsMatrix>> run_channel(const ExperimentConfig& cfg, int num_volte,
                                                 int run) {
    validate(cfg);
    const FadingGenerator fading(EtuProfile::with_last_tap_db(cfg.etu_last_tap_db), cfg.num_prb);
    return draw_run_channel(cfg, fading, num_volte, run);
}

std::uint64_t run_seed(std::uint64_t seed, int run) {
    return derive_seed(seed, kVolteStream, run);
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    check_size_caps(cfg);
    const auto profile = EtuProfile::with_last_tap_db(cfg.etu_last_tap_db);
    const FadingGenerator fading(profile, cfg.num_prb);
    FrameOptions options;
    options.gamma = cfg.gamma;
    options.strict_pseudocode = cfg.strict_pseudocode;
    options.time_limit = std::chrono::duration<double>(cfg.solver_time_limit_s);
    options.node_limit = cfg.solver_node_limit;

    const std::size_t sweep = cfg.volte_sweep.size();
    const std::size_t jobs = sweep * static_cast<std::size_t>(cfg.runs);
    const std::size_t policies = cfg.policies.size();
    std::vector<RunRecord> records(jobs * policies);

    auto run_job = [&](std::size_t job) {
        const int u = cfg.volte_sweep[job / cfg.runs];
        const int run = static_cast<int>(job % cfg.runs);
        const std::uint64_t seed = run_seed(cfg.seed, run);
        const auto channel = draw_run_channel(cfg, fading, u, run);
        for (std::size_t p = 0; p < policies; ++p) {
            std::vector<double> pf(static_cast<std::size_t>(cfg.num_data), 1.0);
            std::vector<FrameRun> frames;
            std::int64_t timeouts = 0;
            for (const auto& bits : channel) {
                auto frame = run_frame(bits, u, cfg.num_data, cfg.policies[p], pf, options);
                pf = frame.state.pf_avg;
                timeouts += frame.solver_timeouts;
                frames.push_back(std::move(frame));
            }
            // policy-major order: policy, then sweep position, then run
            RunRecord& rec = records[p * jobs + job];
            rec.policy = cfg.policies[p];
            rec.num_volte = u;
            rec.run = run;
            rec.seed = seed;
            rec.metrics = run_metrics(frames, u, cfg.num_data);
            rec.solver_timeouts = timeouts;
        }
    };

    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(cfg.threads, jobs));
    if (workers <= 1) {
        for (std::size_t job = 0; job < jobs; ++job) {
            run_job(job);
        }
        return records;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t job = next++; job < jobs; job = next++) {
                try {
                    run_job(job);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    next = jobs;
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return records;
}

void write_runs_csv(std::ostream& out, const ExperimentConfig& cfg,
                    const std::vector<RunRecord>& records) {
    out << kRunsCsvHeader << '\n';
    for (const auto& r : records) {
        const auto& m = r.metrics;
        out << to_string(r.policy) << ',' << format_double("%g", cfg.bandwidth_mhz) << ','
            << cfg.num_prb << ',' << r.num_volte << ',' << cfg.num_data << ',' << r.seed << ','
            << format_double("%.3f", m.volte_bits_per_frame * kKbpsPerBitPerFrame) << ','
            << format_double("%.3f", m.data_bits_per_frame * kKbpsPerBitPerFrame) << ','
            << format_double("%.3f", m.total_bits_per_frame * kKbpsPerBitPerFrame) << ','
            << format_double("%.6f", m.jain) << ','
            << (std::isnan(m.outage) ? std::string() : format_double("%.6f", m.outage)) << ','
            << format_double("%.6f", m.infeasible) << '\n';
    }
}

const std::vector<std::string>& plot_families() {
    static const std::vector<std::string> families{"throughput", "outage", "fairness",
                                                   "infeasibility"};
    return families;
}

void emit_plotdata(std::istream& runs_csv, std::string_view family, std::ostream& out) {
    const auto& families = plot_families();
    if (std::find(families.begin(), families.end(), family) == families.end()) {
        throw std::invalid_argument("unknown figure family '" + std::string(family) + "'");
    }
    std::string line;
    if (!std::getline(runs_csv, line) || trim(line) != kRunsCsvHeader) {
        throw std::invalid_argument("runs CSV header mismatch");
    }

    // group key = policy,bandwidth_mhz,N,U,K as written; first-appearance order
    std::vector<std::string> keys;
    std::map<std::string, std::vector<RunMetrics>> groups;
    std::map<std::string, std::string> group_policy;
    std::map<std::string, int> group_u;
    int line_no = 1;
    while (std::getline(runs_csv, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split(trim(line), ',');
        if (cells.size() != 12) {
            throw std::invalid_argument("runs CSV line " + std::to_string(line_no) +
                                        ": expected 12 fields");
        }
        auto number = [&](std::size_t i) {
            try {
                return parse_number<double>("column", cells[i]);
            } catch (const ConfigError&) {
                throw std::invalid_argument("runs CSV line " + std::to_string(line_no) +
                                            ": bad number '" + std::string(cells[i]) + "'");
            }
        };
        std::string key;
        for (std::size_t i = 0; i < 5; ++i) {
            key += std::string(cells[i]) + (i < 4 ? "," : "");
        }
        // the throughput fields carry the CSV's kbps figures here
        RunMetrics m;
        m.volte_bits_per_frame = number(6);
        m.data_bits_per_frame = number(7);
        m.total_bits_per_frame = number(8);
        m.jain = number(9);
        m.outage = cells[10].empty() ? std::nan("") : number(10);
        m.infeasible = number(11);
        if (!groups.count(key)) {
            keys.push_back(key);
            group_policy[key] = std::string(cells[0]);
            group_u[key] = static_cast<int>(number(3));
        }
        groups[key].push_back(m);
    }

    const std::string head = "policy,bandwidth_mhz,N,U,K,runs";
    if (family == "throughput") {
        out << head << ",volte_kbps_mean,volte_kbps_sd,data_kbps_mean,data_kbps_sd,"
                       "total_kbps_mean,total_kbps_sd\n";
    } else if (family == "outage") {
        out << head << ",outage_mean,outage_sd\n";
    } else if (family == "fairness") {
        out << head << ",jain_mean,jain_sd\n";
    } else {
        out << head << ",infeasible_mean,infeasible_sd\n";
    }
    for (const auto& key : keys) {
        if (family == "outage" && group_u[key] == 0) {
            continue;
        }
        if (family == "infeasibility" && group_policy[key] != to_string(Policy::frame_optimal)) {
            continue;
        }
        const auto s = aggregate_runs(groups[key]);
        out << key << ',' << s.runs;
        auto pair = [&](double RunMetrics::*f, const char* fmt) {
            out << ',' << format_double(fmt, s.mean.*f) << ',' << format_double(fmt, s.stddev.*f);
        };
        if (family == "throughput") {
            pair(&RunMetrics::volte_bits_per_frame, "%.3f");
            pair(&RunMetrics::data_bits_per_frame, "%.3f");
            pair(&RunMetrics::total_bits_per_frame, "%.3f");
        } else if (family == "outage") {
            pair(&RunMetrics::outage, "%.6f");
        } else if (family == "fairness") {
            pair(&RunMetrics::jain, "%.6f");
        } else {
            pair(&RunMetrics::infeasible, "%.6f");
        }
        out << '\n';
    }
}

}  // namespace volte
