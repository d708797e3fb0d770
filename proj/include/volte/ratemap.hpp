#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>

namespace volte {

/// Bits delivered to a VoLTE user in its TTI (payload plus RLC/MAC overhead).
inline constexpr int kVoltePacketBits = 300;
/// AMR-WB 12.65 speech payload per 20 ms packet; what the VoLTE accumulator counts.
inline constexpr int kVoltePayloadBits = 253;
/// Usable resource elements per PRB per TTI after reference-signal overhead.
inline constexpr int kResourceElementsPerPrb = 120;

/// Channel quality indicator, 0 (no transmission) through 15.
class CqiIndex {
  public:
    constexpr CqiIndex() = default;
    explicit CqiIndex(int value);

    constexpr int value() const { return value_; }
    constexpr bool transmits() const { return value_ > 0; }

    friend constexpr auto operator<=>(CqiIndex, CqiIndex) = default;

  private:
    int value_ = 0;
};

struct McsEntry {
    int cqi;
    int modulation_order;   // coded bits per RE: 2, 4 or 6
    int code_rate_x1024;
    double beta;            // carried for completeness, not used by any rate computation
    double sinr_threshold_db;
};

/// The 16-row CQI table (row 0 is the no-transmission sentinel).
const std::array<McsEntry, 16>& mcs_table();

/// Largest CQI whose switching threshold is <= sinr_db (inclusive); 0 below CQI 1.
/// Throws std::invalid_argument for non-finite input.
CqiIndex cqi_from_sinr(double sinr_db);

/// floor(120 * Qm * rate / 1024).
int bits_per_prb(CqiIndex cqi);

/// Smallest PRB count whose bits reach one VoLTE packet; nullopt when CQI is 0.
std::optional<int> prbs_for_voice_packet(CqiIndex cqi);

/// The 16 distinct values bits_per_prb can take, indexed by CQI.
const std::array<int, 16>& bits_per_prb_image();

/// CSV export: cqi,modulation_order,code_rate_x1024,beta,sinr_threshold_db
void write_mcs_table_csv(std::ostream& out);

}  // namespace volte
