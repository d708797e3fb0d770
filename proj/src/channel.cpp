#include "volte/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "volte/ratemap.hpp"

namespace volte {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double path_gain(double distance_m, double exponent) {
    return std::pow(std::max(distance_m, kMinLinkDistanceM), -exponent);
}

// Serving and interferer fading are independent streams of one seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    std::mt19937_64 rng(seq);
    return rng();
}

}  // namespace

EtuProfile EtuProfile::standard() {
    return EtuProfile{{{0, -1.0},
                       {50, -1.0},
                       {120, -1.0},
                       {200, 0.0},
                       {230, 0.0},
                       {500, 0.0},
                       {1600, -3.0},
                       {2300, -5.0},
                       {5000, -7.0}}};
}

EtuProfile EtuProfile::with_last_tap_db(double power_db) {
    EtuProfile profile = standard();
    profile.taps.back().avg_power_db = power_db;
    return profile;
}

EtuProfile EtuProfile::flat() { return EtuProfile{{{0, 0.0}}}; }

std::vector<double> EtuProfile::normalized_powers() const {
    std::vector<double> powers;
    powers.reserve(taps.size());
    double total = 0.0;
    for (const auto& tap : taps) {
        powers.push_back(db_to_linear(tap.avg_power_db));
        total += powers.back();
    }
    for (auto& p : powers) {
        p /= total;
    }
    return powers;
}

void EtuProfile::validate() const {
    if (taps.empty()) {
        throw std::invalid_argument("power-delay profile has no taps");
    }
    if (taps.front().delay_ns != 0) {
        throw std::invalid_argument("first tap must have zero excess delay");
    }
    for (std::size_t i = 1; i < taps.size(); ++i) {
        if (taps[i].delay_ns <= taps[i - 1].delay_ns) {
            throw std::invalid_argument("tap delays must be strictly increasing");
        }
    }
    for (const auto& tap : taps) {
        if (!std::isfinite(tap.avg_power_db)) {
            throw std::invalid_argument("tap power must be finite");
        }
    }
}

int Topology::num_volte() const {
    return static_cast<int>(std::count_if(users.begin(), users.end(), [](const UserPlacement& u) {
        return u.kind == UserKind::volte;
    }));
}

int Topology::num_data() const { return static_cast<int>(users.size()) - num_volte(); }

std::vector<Point> interferer_sites(double inter_site_distance_m) {
    // axial hex coordinates (q, r); hex distance = (|q| + |r| + |q + r|) / 2
    std::vector<Point> sites;
    const double d = inter_site_distance_m;
    for (int ring = 1; ring <= 2; ++ring) {
        for (int q = -ring; q <= ring; ++q) {
            for (int r = -ring; r <= ring; ++r) {
                if (std::abs(q) + std::abs(r) + std::abs(q + r) != 2 * ring) {
                    continue;
                }
                sites.push_back({d * (q + 0.5 * r), d * (std::numbers::sqrt3 / 2.0) * r});
            }
        }
    }
    return sites;
}

Topology build_topology(std::uint64_t seed, int num_volte, int num_data, double cell_radius_m,
                        double pathloss_exponent) {
    if (num_volte < 0 || num_data < 0) {
        throw std::invalid_argument("user counts must be non-negative");
    }
    if (!(cell_radius_m > 0.0)) {
        throw std::invalid_argument("cell radius must be positive");
    }
    if (!(pathloss_exponent > 2.0)) {
        throw std::invalid_argument("path-loss exponent must exceed 2");
    }
    Topology topo;
    topo.cell_radius_m = cell_radius_m;
    topo.pathloss_exponent = pathloss_exponent;
    topo.interferer_sites = interferer_sites(std::numbers::sqrt3 * cell_radius_m);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int total = num_volte + num_data;
    topo.users.reserve(total);
    for (int i = 0; i < total; ++i) {
        const double radius = cell_radius_m * std::sqrt(unit(rng));
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        topo.users.push_back({{radius * std::cos(angle), radius * std::sin(angle)},
                              i < num_volte ? UserKind::volte : UserKind::data});
    }
    return topo;
}

FadingGenerator::FadingGenerator(const EtuProfile& profile, int num_prb) : num_prb_(num_prb) {
    profile.validate();
    if (num_prb < 1) {
        throw std::invalid_argument("fading needs at least one PRB");
    }
    const auto powers = profile.normalized_powers();
    for (double p : powers) {
        tap_sigma_.push_back(std::sqrt(p / 2.0));
    }
    const int subcarriers = num_prb * kSubcarriersPerPrb;
    const std::size_t taps = powers.size();
    phasors_.resize(static_cast<std::size_t>(subcarriers) * taps);
    for (int s = 0; s < subcarriers; ++s) {
        const double f = s * kSubcarrierSpacingHz;
        for (std::size_t l = 0; l < taps; ++l) {
            const double phase = -2.0 * std::numbers::pi * f * profile.taps[l].delay_ns * 1e-9;
            phasors_[s * taps + l] = std::polar(1.0, phase);
        }
    }
}

Grid<double> FadingGenerator::draw(std::mt19937_64& rng, int num_links) const {
    const std::size_t taps = tap_sigma_.size();
    Grid<double> gains(static_cast<std::size_t>(num_links), static_cast<std::size_t>(num_prb_));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::complex<double>> tap_gain(taps);
    for (int link = 0; link < num_links; ++link) {
        for (std::size_t l = 0; l < taps; ++l) {
            const double re = normal(rng);
            const double im = normal(rng);
            tap_gain[l] = {tap_sigma_[l] * re, tap_sigma_[l] * im};
        }
        auto row = gains.row(link);
        for (int n = 0; n < num_prb_; ++n) {
            double power = 0.0;
            for (int i = 0; i < kSubcarriersPerPrb; ++i) {
                const auto* ph = &phasors_[(n * kSubcarriersPerPrb + i) * taps];
                std::complex<double> h{};
                for (std::size_t l = 0; l < taps; ++l) {
                    h += tap_gain[l] * ph[l];
                }
                power += std::norm(h);
            }
            row[n] = power / kSubcarriersPerPrb;
        }
    }
    return gains;
}

Grid<double> draw_fading(std::uint64_t seed, const EtuProfile& profile, int num_prb,
                         int num_users) {
    FadingGenerator generator(profile, num_prb);
    std::mt19937_64 rng(seed);
    return generator.draw(rng, num_users);
}

ChannelGains draw_channel_gains(std::uint64_t seed, const FadingGenerator& fading,
                                int num_users) {
    std::mt19937_64 serving_rng(stream_seed(seed, 1));
    std::mt19937_64 interferer_rng(stream_seed(seed, 2));
    return {fading.draw(serving_rng, num_users),
            fading.draw(interferer_rng, num_users * kInterfererCount)};
}

SinrMatrix compute_sinr_matrix(const Topology& topology, const ChannelGains& gains,
                               const RadioParams& radio) {
    const std::size_t users = topology.users.size();
    const std::size_t sites = topology.interferer_sites.size();
    if (gains.serving.rows() != users || gains.interfering.rows() != users * sites ||
        gains.interfering.cols() != gains.serving.cols()) {
        throw std::invalid_argument("channel gains do not match topology");
    }
    const std::size_t prbs = gains.serving.cols();
    const double tx_mw = db_to_linear(radio.tx_power_dbm);
    const double noise_mw = db_to_linear(radio.noise_power_dbm);
    const double alpha = topology.pathloss_exponent;

    SinrMatrix sinr(prbs, users);
    std::vector<double> site_gain(sites);
    for (std::size_t u = 0; u < users; ++u) {
        const Point pos = topology.users[u].position;
        const double own = tx_mw * path_gain(distance(pos, topology.serving_site), alpha);
        for (std::size_t j = 0; j < sites; ++j) {
            site_gain[j] = tx_mw * path_gain(distance(pos, topology.interferer_sites[j]), alpha);
        }
        for (std::size_t n = 0; n < prbs; ++n) {
            double interference = noise_mw;
            for (std::size_t j = 0; j < sites; ++j) {
                interference += site_gain[j] * gains.interfering(u * sites + j, n);
            }
            const double signal = own * gains.serving(u, n);
            double value = 10.0 * std::log10(signal / interference);
            if (!std::isfinite(value)) {
                // zero signal gives -inf; infinite SINR when nothing interferes
                value = value > 0 ? std::numeric_limits<double>::max()
                                  : std::numeric_limits<double>::lowest();
            }
            sinr(n, u) = value;
        }
    }
    return sinr;
}

BitsMatrix bits_matrix(const SinrMatrix& sinr) {
    BitsMatrix bits(sinr.rows(), sinr.cols());
    for (std::size_t n = 0; n < sinr.rows(); ++n) {
        for (std::size_t u = 0; u < sinr.cols(); ++u) {
            bits(n, u) = bits_per_prb(cqi_from_sinr(sinr(n, u)));
        }
    }
    return bits;
}

namespace {

template <typename T>
void write_grid(std::ostream& out, const Grid<T>& grid) {
    out << "prb";
    for (std::size_t u = 0; u < grid.cols(); ++u) {
        out << ",u" << u;
    }
    out << '\n';
    for (std::size_t n = 0; n < grid.rows(); ++n) {
        out << n;
        for (std::size_t u = 0; u < grid.cols(); ++u) {
            out << ',' << grid(n, u);
        }
        out << '\n';
    }
}

}  // namespace

void write_matrix_csv(std::ostream& out, const SinrMatrix& sinr) { write_grid(out, sinr); }
void write_matrix_csv(std::ostream& out, const BitsMatrix& bits) { write_grid(out, bits); }

}  // namespace volte
