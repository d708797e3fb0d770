#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "volte/ratemap.hpp"

using namespace volte;

TEST_CASE("cqi_from_sinr follows the switching thresholds") {
    CHECK(cqi_from_sinr(-12.0).value() == 0);
    CHECK(cqi_from_sinr(-9.478).value() == 1);
    CHECK(cqi_from_sinr(0.0).value() == 4);
    CHECK(cqi_from_sinr(25.0).value() == 15);
}

TEST_CASE("cqi_from_sinr rejects non-finite input") {
    CHECK_THROWS_AS(cqi_from_sinr(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    CHECK_THROWS_AS(cqi_from_sinr(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("CqiIndex range") {
    CHECK_THROWS(CqiIndex(16));
    CHECK_THROWS(CqiIndex(-1));
    CHECK(CqiIndex(15).transmits());
    CHECK_FALSE(CqiIndex(0).transmits());
}

TEST_CASE("bits per PRB worked values") {
    CHECK(bits_per_prb(CqiIndex(15)) == 666);
    CHECK(bits_per_prb(CqiIndex(7)) == 177);
    CHECK(bits_per_prb(CqiIndex(1)) == 18);
    CHECK(bits_per_prb(CqiIndex(0)) == 0);
}

TEST_CASE("PRBs per voice packet") {
    CHECK(prbs_for_voice_packet(CqiIndex(15)) == 1);
    CHECK(prbs_for_voice_packet(CqiIndex(7)) == 2);
    // ceil(300 / 18)
    CHECK(prbs_for_voice_packet(CqiIndex(1)) == 17);
    CHECK_FALSE(prbs_for_voice_packet(CqiIndex(0)).has_value());
}

TEST_CASE("table shape and monotonicity") {
    const auto& table = mcs_table();
    for (int c = 1; c <= 15; ++c) {
        CHECK(table[c].cqi == c);
        CHECK(table[c].sinr_threshold_db > table[c - 1].sinr_threshold_db);
        CHECK((table[c].modulation_order == 2 || table[c].modulation_order == 4 ||
               table[c].modulation_order == 6));
        CHECK(bits_per_prb(CqiIndex(c)) >= bits_per_prb(CqiIndex(c - 1)));
    }
}

TEST_CASE("packet PRB count is the tight cover") {
    for (int c = 1; c <= 15; ++c) {
        const int bits = bits_per_prb(CqiIndex(c));
        const int count = *prbs_for_voice_packet(CqiIndex(c));
        CHECK(count * bits >= kVoltePacketBits);
        CHECK((count - 1) * bits < kVoltePacketBits);
    }
}

TEST_CASE("thresholds map inclusively and step down just below") {
    const auto& table = mcs_table();
    for (int c = 1; c <= 15; ++c) {
        const double t = table[c].sinr_threshold_db;
        CHECK(cqi_from_sinr(t).value() == c);
        CHECK(cqi_from_sinr(std::nextafter(t, -1e9)).value() == c - 1);
        CHECK(cqi_from_sinr(t - 1e-6).value() == c - 1);
    }
    int previous = 0;
    for (double s = -20.0; s <= 30.0; s += 0.01) {
        const int c = cqi_from_sinr(s).value();
        CHECK(c >= previous);
        previous = c;
    }
}

TEST_CASE("table CSV export") {
    std::ostringstream out;
    write_mcs_table_csv(out);
    const std::string csv = out.str();
    CHECK(csv.rfind("cqi,modulation_order,code_rate_x1024,beta,sinr_threshold_db\n", 0) == 0);
    CHECK(csv.find("15,6,948,28,19.809\n") != std::string::npos);
    CHECK(csv.find("1,2,78,1,-9.478\n") != std::string::npos);
}
