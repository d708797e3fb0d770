#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "volte/experiment.hpp"

using namespace volte;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

std::vector<std::string> cells(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::string run_csv(const ExperimentConfig& cfg) {
    std::ostringstream out;
    write_runs_csv(out, cfg, run_experiment(cfg));
    return out.str();
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.volte_sweep = {0, 3};
    cfg.runs = 3;
    cfg.policies = {Policy::heuristic, Policy::baseline, Policy::frame_optimal};
    return cfg;
}

}  // namespace

TEST_CASE("bandwidth maps to PRBs") {
    CHECK(prbs_for_bandwidth(1.4) == 7);
    CHECK(prbs_for_bandwidth(3) == 15);
    CHECK(prbs_for_bandwidth(10) == 50);
    CHECK_THROWS_AS(prbs_for_bandwidth(5), ConfigError);
    ExperimentConfig cfg;
    apply_setting(cfg, "bandwidth", "10");
    CHECK(cfg.num_prb == 50);
    apply_setting(cfg, "bandwidth", " 3 ");
    CHECK(cfg.num_prb == 15);
}

TEST_CASE("config file parsing") {
    std::istringstream in(
        "# sweep\n"
        "bandwidth = 1.4\n"
        "num_data = 7   # data users\n"
        "volte_sweep = 0:20:5\n"
        "policy = heuristic, baseline\n"
        "runs = 4\n"
        "seed = 77\n"
        "gamma = 0.8\n"
        "strict_pseudocode = true\n"
        "\n"
        "noise_power_dbm = -100\n");
    const auto cfg = parse_config(in);
    CHECK(cfg.num_prb == 7);
    CHECK(cfg.num_data == 7);
    CHECK(cfg.volte_sweep == std::vector<int>{0, 5, 10, 15, 20});
    CHECK(cfg.policies == std::vector<Policy>{Policy::heuristic, Policy::baseline});
    CHECK(cfg.runs == 4);
    CHECK(cfg.seed == 77);
    CHECK(cfg.gamma == 0.8);
    CHECK(cfg.strict_pseudocode);
    CHECK(cfg.noise_power_dbm == -100.0);
    CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("config errors") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
    };
    CHECK_THROWS_AS(parse("colour = blue\n"), ConfigError);
    CHECK_THROWS_AS(parse("runs\n"), ConfigError);
    CHECK_THROWS_AS(parse("runs = many\n"), ConfigError);
    CHECK_THROWS_AS(parse("bandwidth = 5\n"), ConfigError);
    CHECK_THROWS_AS(parse("policy = greedy\n"), ConfigError);
    CHECK_THROWS_AS(parse("volte_sweep = 0:10:0\n"), ConfigError);
    try {
        parse("runs = 3\nbogus = 1\n");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    auto invalid = [](auto edit) {
        ExperimentConfig cfg;
        edit(cfg);
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    };
    invalid([](ExperimentConfig& c) { c.gamma = 1.5; });
    invalid([](ExperimentConfig& c) { c.gamma = 0.0; });
    invalid([](ExperimentConfig& c) { c.runs = 0; });
    invalid([](ExperimentConfig& c) { c.num_data = -1; });
    invalid([](ExperimentConfig& c) { c.volte_sweep = {}; });
    invalid([](ExperimentConfig& c) { c.volte_sweep = {-2}; });
    invalid([](ExperimentConfig& c) { c.policies = {}; });
    invalid([](ExperimentConfig& c) { c.pathloss_exponent = 2.0; });
    invalid([](ExperimentConfig& c) {
        c.per_tti_fading = true;
        c.policies = {Policy::frame_optimal};
    });
    CHECK_NOTHROW(validate(ExperimentConfig{}));
}

TEST_CASE("size caps name the cap") {
    ExperimentConfig cfg;
    cfg.policies = {Policy::frame_optimal};
    cfg.volte_sweep = {0, 10, 30};
    try {
        check_size_caps(cfg);
        FAIL("expected a refusal");
    } catch (const SizeCapError& e) {
        const std::string what = e.what();
        CHECK(what.find("frame_optimal") != std::string::npos);
        CHECK(what.find("U=30") != std::string::npos);
        CHECK(what.find("frame_var_cap=2000") != std::string::npos);
    }
    cfg.volte_sweep = {0, 10, 20};
    CHECK_NOTHROW(check_size_caps(cfg));
    cfg.policies = {Policy::heuristic};
    cfg.volte_sweep = {600};
    CHECK_NOTHROW(check_size_caps(cfg));
    cfg.policies = {Policy::tti_optimal};
    cfg.tti_var_cap = 10;
    CHECK_THROWS_AS(check_size_caps(cfg), SizeCapError);
}

TEST_CASE("seeds are stable, distinct and nested across U") {
    CHECK(derive_seed(1, -2, 0) == run_seed(1, 0));
    CHECK(derive_seed(1, 0, 0) == derive_seed(1, 0, 0));
    CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
    CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
    CHECK(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));

    ExperimentConfig cfg;
    const auto few = run_channel(cfg, 2, 4);
    const auto more = run_channel(cfg, 5, 4);
    REQUIRE(few.size() == 1);
    REQUIRE(few[0].size() == 1);
    const auto& a = few[0][0];
    const auto& b = more[0][0];
    CHECK(a.rows() == 15);
    CHECK(a.cols() == 7);
    CHECK(b.cols() == 10);
    // the first two VoLTE users and every data user keep their channels
    for (std::size_t n = 0; n < a.rows(); ++n) {
        for (std::size_t u = 0; u < 2; ++u) {
            CHECK(a(n, u) == b(n, u));
        }
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(a(n, 2 + k) == b(n, 5 + k));
        }
    }

    cfg.per_tti_fading = true;
    cfg.frames_per_run = 2;
    const auto per_tti = run_channel(cfg, 1, 0);
    REQUIRE(per_tti.size() == 2);
    CHECK(per_tti[0].size() == 20);
    CHECK_FALSE(per_tti[0][0] == per_tti[0][1]);
}

TEST_CASE("run CSV layout") {
    const auto cfg = small_config();
    const auto text = run_csv(cfg);
    const auto rows = lines(text);
    REQUIRE(rows.size() == 1 + 3 * 2 * 3);
    CHECK(rows[0] == kRunsCsvHeader);
    // policy-major, then sweep, then run
    CHECK(rows[1].rfind("heuristic,3,15,0,5,", 0) == 0);
    CHECK(rows[4].rfind("heuristic,3,15,3,5,", 0) == 0);
    CHECK(rows[7].rfind("baseline,3,15,0,5,", 0) == 0);
    CHECK(rows[13].rfind("frame_optimal,3,15,0,5,", 0) == 0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto c = cells(rows[i]);
        REQUIRE(c.size() == 12);
        const bool no_volte = c[3] == "0";
        CHECK(c[10].empty() == no_volte);
        CHECK(std::stod(c[8]) == doctest::Approx(std::stod(c[6]) + std::stod(c[7])).epsilon(1e-5));
        if (no_volte) {
            CHECK(c[6] == "0.000");
        }
    }
    // every policy of a (U, run) pair reports the same seed
    CHECK(cells(rows[1])[5] == cells(rows[7])[5]);
    CHECK(cells(rows[1])[5] != cells(rows[2])[5]);
}

TEST_CASE("experiments are reproducible byte for byte, whatever the thread count") {
    auto cfg = small_config();
    const auto once = run_csv(cfg);
    CHECK(once == run_csv(cfg));
    cfg.threads = 3;
    CHECK(once == run_csv(cfg));
    cfg.seed = 2;
    CHECK(once != run_csv(cfg));
}

TEST_CASE("plot data families") {
    const std::string runs = std::string(kRunsCsvHeader) +
                             "\n"
                             "heuristic,3,15,0,5,11,0.000,100.000,100.000,0.500000,,0.000000\n"
                             "heuristic,3,15,0,5,12,0.000,300.000,300.000,0.700000,,0.000000\n"
                             "heuristic,3,15,4,5,13,50.600,80.000,130.600,0.400000,0.250000,0.000000\n"
                             "frame_optimal,3,15,4,5,13,50.600,90.000,140.600,0.300000,0.000000,1.000000\n";
    auto emit = [&](const std::string& family) {
        std::istringstream in(runs);
        std::ostringstream out;
        emit_plotdata(in, family, out);
        return lines(out.str());
    };

    const auto throughput = emit("throughput");
    REQUIRE(throughput.size() == 4);
    CHECK(throughput[0] ==
          "policy,bandwidth_mhz,N,U,K,runs,volte_kbps_mean,volte_kbps_sd,data_kbps_mean,"
          "data_kbps_sd,total_kbps_mean,total_kbps_sd");
    CHECK(throughput[1].rfind("heuristic,3,15,0,5,2,0.000,0.000,200.000,141.421,", 0) == 0);

    const auto outage = emit("outage");
    REQUIRE(outage.size() == 3);
    CHECK(outage[1] == "heuristic,3,15,4,5,1,0.250000,0.000000");
    CHECK(outage[2] == "frame_optimal,3,15,4,5,1,0.000000,0.000000");

    const auto fairness = emit("fairness");
    REQUIRE(fairness.size() == 4);
    CHECK(fairness[1] == "heuristic,3,15,0,5,2,0.600000,0.141421");

    const auto infeasibility = emit("infeasibility");
    REQUIRE(infeasibility.size() == 2);
    CHECK(infeasibility[1] == "frame_optimal,3,15,4,5,1,1.000000,0.000000");

    std::istringstream in(runs);
    std::ostringstream out;
    CHECK_THROWS_AS(emit_plotdata(in, "latency", out), std::invalid_argument);
    std::istringstream bad("policy,U\n");
    CHECK_THROWS_AS(emit_plotdata(bad, "outage", out), std::invalid_argument);
}

TEST_CASE("plot data round-trips a real run CSV") {
    const auto text = run_csv(small_config());
    for (const auto& family : plot_families()) {
        std::istringstream in(text);
        std::ostringstream out;
        CHECK_NOTHROW(emit_plotdata(in, family, out));
        CHECK(lines(out.str()).size() > 1);
    }
}
