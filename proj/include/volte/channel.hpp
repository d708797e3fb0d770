#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <vector>

namespace volte {

/// Row-major matrix; rows are PRBs or links depending on use.
template <typename T>
class Grid {
  public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const T> values() const { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// SINR in dB, row = PRB, column = user (VoLTE users first, then data users).
using SinrMatrix = Grid<double>;
/// Deliverable bits in one TTI, row = PRB, column = user.
using BitsMatrix = Grid<int>;

struct PathTap {
    int delay_ns;
    double avg_power_db;
};

/// Tapped-delay-line power-delay profile.
struct EtuProfile {
    std::vector<PathTap> taps;

    /// The 9-tap Extended Typical Urban profile. The last tap is -7 dB.
    static EtuProfile standard();
    /// Same profile with the last tap's power replaced (e.g. +7.0 to follow the printed table).
    static EtuProfile with_last_tap_db(double power_db);
    /// One tap at zero delay; frequency-flat.
    static EtuProfile flat();

    /// Linear tap powers scaled to sum to one.
    std::vector<double> normalized_powers() const;
    void validate() const;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class UserKind { volte, data };

struct UserPlacement {
    Point position;
    UserKind kind;
};

struct Topology {
    Point serving_site;
    std::vector<Point> interferer_sites;
    std::vector<UserPlacement> users;  // VoLTE users first
    double cell_radius_m = 0.0;
    double pathloss_exponent = 0.0;

    int num_volte() const;
    int num_data() const;
};

inline constexpr int kInterfererCount = 18;
inline constexpr int kSubcarriersPerPrb = 12;
inline constexpr double kSubcarrierSpacingHz = 15e3;
inline constexpr double kMinLinkDistanceM = 1.0;

/// Users placed area-uniformly on the disk; 18 interferers on hex rings 1-2 at
/// inter-site distance sqrt(3) * radius.
Topology build_topology(std::uint64_t seed, int num_volte, int num_data, double cell_radius_m,
                        double pathloss_exponent);

/// Hex-lattice sites of rings 1 and 2 around the origin.
std::vector<Point> interferer_sites(double inter_site_distance_m);

/// Draws Rayleigh tap gains and evaluates per-PRB mean |H(f)|^2.
/// The phasor table exp(-j 2 pi f tau) is built once per (profile, PRB count).
class FadingGenerator {
  public:
    FadingGenerator(const EtuProfile& profile, int num_prb);

    int num_prb() const { return num_prb_; }

    /// One row per link, one column per PRB.
    Grid<double> draw(std::mt19937_64& rng, int num_links) const;

  private:
    int num_prb_;
    std::vector<double> tap_sigma_;                   // sqrt(power / 2) per real dimension
    std::vector<std::complex<double>> phasors_;       // [subcarrier][tap]
};

/// Per-user per-PRB gains, deterministic in seed.
Grid<double> draw_fading(std::uint64_t seed, const EtuProfile& profile, int num_prb,
                         int num_users);

struct RadioParams {
    double tx_power_dbm = 46.0;
    double noise_power_dbm = -110.0;
};

/// Serving-link and interferer-link fading for every user of a topology.
struct ChannelGains {
    Grid<double> serving;      // users x PRB
    Grid<double> interfering;  // (user * 18 + site) x PRB
};

ChannelGains draw_channel_gains(std::uint64_t seed, const FadingGenerator& fading, int num_users);

SinrMatrix compute_sinr_matrix(const Topology& topology, const ChannelGains& gains,
                               const RadioParams& radio);

BitsMatrix bits_matrix(const SinrMatrix& sinr);

/// row = PRB, column = user
void write_matrix_csv(std::ostream& out, const SinrMatrix& sinr);
void write_matrix_csv(std::ostream& out, const BitsMatrix& bits);

}  // namespace volte
