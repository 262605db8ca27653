#include "uavsim/physics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavsim::physics {

namespace {
constexpr double kSpeedOfLight = 299'792'458.0; // m/s
}

double ChannelParams::unit_distance_gain() const {
    const double x = 4.0 * std::numbers::pi * carrier_hz / kSpeedOfLight;
    return 1.0 / (x * x);
}

double ChannelRealization::true_gain() const {
    double g = 0.0;
    for (const auto& c : coeffs) g += std::norm(c);
    return g;
}

double ChannelRealization::estimated_gain() const {
    double g = 0.0;
    for (const auto& c : estimated) g += std::norm(c);
    return g;
}

double propulsion_power(const PropulsionParams& p, double speed) {
    const double v2 = speed * speed;
    const double tip2 = p.rotor_tip_speed * p.rotor_tip_speed;
    const double v0_2 = p.hover_induced_speed * p.hover_induced_speed;
    const double blade = p.blade_profile_power * (1.0 + 3.0 * v2 / tip2);
    const double induced =
        p.induced_power *
        std::sqrt(std::sqrt(1.0 + v2 * v2 / (4.0 * v0_2 * v0_2)) - v2 / (2.0 * v0_2));
    const double parasite = p.parasite_coeff * v2 * speed;
    return blade + induced + parasite;
}

double elevation_deg(double horizontal_dist, double altitude) {
    if (horizontal_dist <= 0.0) return 90.0;
    return (180.0 / std::numbers::pi) * std::atan(altitude / horizontal_dist);
}

double los_probability(const ChannelParams& p, double horizontal_dist, double altitude) {
    const double theta = elevation_deg(horizontal_dist, altitude);
    return 1.0 / (1.0 + p.los_a * std::exp(-p.los_b * (theta - p.los_a)));
}

ChannelRealization sample_channel(const ChannelParams& p, double horizontal_dist,
                                  double altitude, std::mt19937_64& rng) {
    const double theta_deg = elevation_deg(horizontal_dist, altitude);
    const double theta_rad = theta_deg * std::numbers::pi / 180.0;
    const double dist = std::sqrt(horizontal_dist * horizontal_dist + altitude * altitude);

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const bool los = unif(rng) < los_probability(p, horizontal_dist, altitude);
    double gain = p.unit_distance_gain() * std::pow(dist, -p.pathloss_exponent);
    if (!los) gain *= p.nlos_attenuation;

    // Rician factor grows with elevation; the exponent operates on radians so
    // kappa stays within a physically sane range (~1e3 at zenith).
    const double kappa = p.rician_a1 * std::exp(p.rician_a2 * theta_rad);
    const double los_scale = std::sqrt(kappa / (kappa + 1.0));
    const double nlos_scale = std::sqrt(1.0 / (kappa + 1.0));

    std::normal_distribution<double> normal(0.0, 1.0);
    const double amp = std::sqrt(gain);
    const double err_sigma =
        std::sqrt(p.sigma_e2 / (2.0 * static_cast<double>(p.num_antennas)));

    ChannelRealization out;
    out.line_of_sight = los;
    out.coeffs.resize(static_cast<size_t>(p.num_antennas));
    out.estimated.resize(static_cast<size_t>(p.num_antennas));
    for (int k = 0; k < p.num_antennas; ++k) {
        // Deterministic LoS component of unit modulus plus CN(0,1) scatter.
        const std::complex<double> scatter(normal(rng) / std::sqrt(2.0),
                                           normal(rng) / std::sqrt(2.0));
        const std::complex<double> small = los_scale + nlos_scale * scatter;
        const std::complex<double> h = amp * small;
        std::complex<double> err(0.0, 0.0);
        if (p.sigma_e2 > 0.0) err = {err_sigma * normal(rng), err_sigma * normal(rng)};
        out.coeffs[static_cast<size_t>(k)] = h;
        out.estimated[static_cast<size_t>(k)] = h - err;
    }
    return out;
}

double achievable_rate(double bandwidth_hz, double channel_gain, const ChannelParams& p) {
    if (bandwidth_hz <= 0.0) throw std::domain_error("achievable_rate: bandwidth must be > 0");
    const double snr = channel_gain * p.tx_power_w / (bandwidth_hz * p.noise_psd);
    // log1p keeps precision in the tiny-SNR regime
    return bandwidth_hz * std::log1p(snr) / std::numbers::ln2;
}

double robust_rate(double bandwidth_hz, double estimated_gain, const ChannelParams& p) {
    if (bandwidth_hz <= 0.0) throw std::domain_error("robust_rate: bandwidth must be > 0");
    const double sinr = estimated_gain * p.tx_power_w /
                        (p.tx_power_w * p.sigma_e2 + bandwidth_hz * p.noise_psd);
    return bandwidth_hz * std::log1p(sinr) / std::numbers::ln2;
}

double robust_rate_limit(double estimated_gain, const ChannelParams& p) {
    return estimated_gain * p.tx_power_w / (p.noise_psd * std::numbers::ln2);
}

} // namespace uavsim::physics
