#include "volte/ratemap.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>
#include <string>

namespace volte {

CqiIndex::CqiIndex(int value) : value_(value) {
    if (value < 0 || value > 15) {
        throw std::out_of_range("CQI index out of range: " + std::to_string(value));
    }
}

const std::array<McsEntry, 16>& mcs_table() {
    static const std::array<McsEntry, 16> table{{
        {0, 0, 0, 0.0, -std::numeric_limits<double>::infinity()},
        {1, 2, 78, 1.00, -9.478},
        {2, 2, 120, 1.40, -6.658},
        {3, 2, 193, 1.40, -4.098},
        {4, 2, 308, 1.48, -1.798},
        {5, 2, 449, 1.50, 0.399},
        {6, 2, 602, 1.62, 2.424},
        {7, 4, 378, 3.10, 4.489},
        {8, 4, 490, 4.32, 6.367},
        {9, 4, 616, 5.37, 8.456},
        {10, 6, 466, 7.71, 10.266},
        {11, 6, 567, 15.5, 12.218},
        {12, 6, 666, 19.6, 14.122},
        {13, 6, 772, 24.7, 15.849},
        {14, 6, 873, 27.6, 17.786},
        {15, 6, 948, 28.0, 19.809},
    }};
    return table;
}

CqiIndex cqi_from_sinr(double sinr_db) {
    if (!std::isfinite(sinr_db)) {
        throw std::invalid_argument("cqi_from_sinr: SINR must be finite");
    }
    const auto& table = mcs_table();
    int cqi = 0;
    for (int c = 1; c <= 15; ++c) {
        if (table[c].sinr_threshold_db <= sinr_db) {
            cqi = c;
        } else {
            break;
        }
    }
    return CqiIndex(cqi);
}

const std::array<int, 16>& bits_per_prb_image() {
    static const std::array<int, 16> image = [] {
        std::array<int, 16> bits{};
        for (const auto& row : mcs_table()) {
            // integer arithmetic: the floor is exact
            bits[row.cqi] =
                kResourceElementsPerPrb * row.modulation_order * row.code_rate_x1024 / 1024;
        }
        return bits;
    }();
    return image;
}

int bits_per_prb(CqiIndex cqi) { return bits_per_prb_image()[cqi.value()]; }

std::optional<int> prbs_for_voice_packet(CqiIndex cqi) {
    const int bits = bits_per_prb(cqi);
    if (bits == 0) {
        return std::nullopt;
    }
    return (kVoltePacketBits + bits - 1) / bits;
}

void write_mcs_table_csv(std::ostream& out) {
    out << "cqi,modulation_order,code_rate_x1024,beta,sinr_threshold_db\n";
    for (const auto& row : mcs_table()) {
        out << row.cqi << ',' << row.modulation_order << ',' << row.code_rate_x1024 << ',';
        if (row.cqi == 0) {
            out << ",\n";
            continue;
        }
        out << row.beta << ',' << std::fixed << std::setprecision(3) << row.sinr_threshold_db
            << std::defaultfloat << '\n';
    }
}

}  // namespace volte
