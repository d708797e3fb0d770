// Experiment driver: sweeps the VoLTE-user count across scheduling policies and
// writes one CSV row per (policy, U, run). Subcommands reduce the run CSV to
// per-figure tables and dump intermediate artefacts for inspection.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "volte/bip.hpp"
#include "volte/experiment.hpp"
#include "volte/ratemap.hpp"
#include "volte/sched.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSizeCap = 3;

// Overrides keep their raw text so the config parser validates both sources alike.
struct Overrides {
    std::string config;
    std::map<std::string, std::string> values;
    std::vector<std::string> policies;
    std::vector<std::string> settings;  // key=value
    bool strict = false;
    bool per_tti = false;

    void add(CLI::App& app, const std::string& flag, const std::string& key,
             const std::string& help) {
        app.add_option_function<std::string>(
            flag, [this, key](const std::string& v) { values[key] = v; }, help);
    }

    volte::ExperimentConfig build() const {
        volte::ExperimentConfig cfg;
        if (!config.empty()) {
            cfg = volte::parse_config_file(config, cfg);
        }
        for (const auto& s : settings) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                throw volte::ConfigError("--set expects key=value, got '" + s + "'");
            }
            volte::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
        }
        for (const auto& [key, value] : values) {
            volte::apply_setting(cfg, key, value);
        }
        if (!policies.empty()) {
            std::string joined;
            for (const auto& p : policies) {
                joined += (joined.empty() ? "" : ",") + p;
            }
            volte::apply_setting(cfg, "policy", joined);
        }
        if (strict) {
            cfg.strict_pseudocode = true;
        }
        if (per_tti) {
            cfg.per_tti_fading = true;
        }
        volte::validate(cfg);
        return cfg;
    }
};

void add_experiment_options(CLI::App& app, Overrides& o) {
    app.add_option("--config", o.config, "key=value configuration file");
    o.add(app, "--bandwidth", "bandwidth", "1.4, 3 or 10 (MHz)");
    o.add(app, "--num-data", "num_data", "data users K");
    o.add(app, "--volte-sweep", "volte_sweep", "VoLTE user counts, e.g. 0,5,10 or 0:600:50");
    app.add_option("--policy", o.policies,
                   "frame_optimal, tti_optimal, tti_optimal_pf, heuristic, heuristic_pf, baseline "
                   "(repeatable)");
    o.add(app, "--runs", "runs", "Monte-Carlo runs per point");
    o.add(app, "--seed", "seed", "base seed");
    o.add(app, "--gamma", "gamma", "PF smoothing factor in (0,1)");
    app.add_flag("--strict-pseudocode", o.strict, "literal bundle loop and band check");
    app.add_flag("--per-tti-fading", o.per_tti, "independent fading per TTI");
    o.add(app, "--frames-per-run", "frames_per_run", "frames per run");
    o.add(app, "--time-limit", "time_limit", "seconds per solver call (safety net)");
    o.add(app, "--node-limit", "node_limit", "branch-and-bound nodes per solver call, 0 = none");
    o.add(app, "--threads", "threads", "worker threads");
    app.add_option("--set", o.settings, "any config key=value (repeatable)");
}

std::ostream* open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") {
        return &std::cout;
    }
    file.open(path);
    if (!file) {
        throw std::runtime_error("cannot write " + path);
    }
    return &file;
}

int run_command(const Overrides& o, const std::string& out_path, const std::string& plot_dir) {
    const auto cfg = o.build();
    volte::check_size_caps(cfg);
    const auto records = volte::run_experiment(cfg);

    std::ofstream file;
    std::ostream* out = open_output(out_path, file);
    volte::write_runs_csv(*out, cfg, records);
    out->flush();

    std::map<std::string, std::int64_t> timeouts;
    for (const auto& r : records) {
        timeouts[std::string(volte::to_string(r.policy))] += r.solver_timeouts;
    }
    for (const auto& [policy, count] : timeouts) {
        if (count > 0) {
            std::cerr << policy << ": " << count
                      << " solver calls exhausted their budget (incumbents used)\n";
        }
    }

    if (!plot_dir.empty()) {
        std::filesystem::create_directories(plot_dir);
        std::ostringstream runs;
        volte::write_runs_csv(runs, cfg, records);
        for (const auto& family : volte::plot_families()) {
            std::istringstream in(runs.str());
            std::ofstream f(std::filesystem::path(plot_dir) / (family + ".csv"));
            volte::emit_plotdata(in, family, f);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VoLTE/data downlink scheduling simulator"};
    app.require_subcommand(0, 1);

    Overrides run_opts;
    std::string out_path;
    std::string plot_dir;
    add_experiment_options(app, run_opts);
    app.add_option("--out", out_path, "run CSV path (default stdout)");
    app.add_option("--plotdata-dir", plot_dir, "also write one CSV per figure family here");

    auto* plot = app.add_subcommand("plotdata", "reduce a run CSV to one figure family");
    std::string plot_in;
    std::string family;
    std::string plot_out;
    plot->add_option("--in", plot_in, "run CSV")->required();
    plot->add_option("--family", family, "throughput, outage, fairness or infeasibility")
        ->required();
    plot->add_option("--out", plot_out, "output path (default stdout)");

    auto* mcs = app.add_subcommand("mcs-table", "print the CQI/MCS table");
    std::string mcs_out;
    mcs->add_option("--out", mcs_out, "output path (default stdout)");

    // Dumps share the experiment options to pick one run's channel.
    Overrides dump_opts;
    int dump_u = 1;
    int dump_run = 0;
    std::string dump_out;
    std::string dump_policy = "heuristic";
    auto* channel = app.add_subcommand("channel", "bits matrix (PRB x user) of one run");
    auto* frame = app.add_subcommand("frame", "allocation of one run's first frame");
    auto* program = app.add_subcommand("program", "frame-level program of one run's first frame");
    for (auto* sub : {channel, frame, program}) {
        add_experiment_options(*sub, dump_opts);
        sub->add_option("--num-volte", dump_u, "VoLTE users U");
        sub->add_option("--run", dump_run, "run index");
        sub->add_option("--out", dump_out, "output path (default stdout)");
    }
    frame->add_option("--dump-policy", dump_policy, "policy to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*plot) {
            std::ifstream in(plot_in);
            if (!in) {
                throw volte::ConfigError("cannot open " + plot_in);
            }
            std::ofstream file;
            try {
                volte::emit_plotdata(in, family, *open_output(plot_out, file));
            } catch (const std::invalid_argument& e) {
                throw volte::ConfigError(e.what());
            }
            return 0;
        }
        if (*mcs) {
            std::ofstream file;
            volte::write_mcs_table_csv(*open_output(mcs_out, file));
            return 0;
        }
        if (*channel || *frame || *program) {
            const auto cfg = dump_opts.build();
            if (dump_u < 0 || dump_run < 0) {
                throw volte::ConfigError("--num-volte and --run must be >= 0");
            }
            const auto frames = volte::run_channel(cfg, dump_u, dump_run);
            const auto& bits = frames.front();
            std::ofstream file;
            std::ostream& out = *open_output(dump_out, file);
            if (*channel) {
                for (std::size_t t = 0; t < bits.size(); ++t) {
                    if (bits.size() > 1) {
                        out << "# tti " << t << '\n';
                    }
                    volte::write_matrix_csv(out, bits[t]);
                }
            } else if (*frame) {
                const auto policy = volte::parse_policy(dump_policy);
                if (!policy) {
                    throw volte::ConfigError("unknown policy '" + dump_policy + "'");
                }
                volte::FrameOptions options;
                options.gamma = cfg.gamma;
                options.strict_pseudocode = cfg.strict_pseudocode;
                options.time_limit = std::chrono::duration<double>(cfg.solver_time_limit_s);
                options.node_limit = cfg.solver_node_limit;
                const std::vector<double> pf(static_cast<std::size_t>(cfg.num_data), 1.0);
                const auto run = volte::run_frame(bits, dump_u, cfg.num_data, *policy, pf, options);
                if (run.infeasible) {
                    std::cerr << "frame-level program infeasible: no allocation\n";
                }
                volte::write_frame_csv(out, run.allocation, bits);
            } else {
                if (bits.size() != 1) {
                    throw volte::ConfigError("the frame-level program needs block fading");
                }
                const auto fp = volte::build_frame_program(bits[0], dump_u, cfg.num_data);
                volte::bip::write_program_dump(out, fp.program);
            }
            return 0;
        }
        return run_command(run_opts, out_path, plot_dir);
    } catch (const volte::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const volte::SizeCapError& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return kExitSizeCap;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
