#pragma once

#include <complex>
#include <random>
#include <vector>

namespace uavsim::physics {

// Rotary-wing propulsion model constants.  Defaults follow the widely used
// rotary-wing reference values and are plain config inputs, overridable per
// experiment.
struct PropulsionParams {
    double blade_profile_power = 79.8563;  // W, power at zero speed (blade profile)
    double induced_power = 88.6279;        // W, induced power in hover
    double parasite_coeff = 0.00924263;    // kg/m, 0.5 * d0 * rho * s * A
    double rotor_tip_speed = 120.0;        // m/s
    double hover_induced_speed = 4.03;     // m/s, mean rotor-induced speed in hover

    // Hover power, the V = 0 limit of propulsion_power.
    double hover_power() const { return blade_profile_power + induced_power; }
};

// Air-to-ground channel: sigmoid LoS probability, distance pathloss with NLoS
// attenuation, Rician small-scale fading with elevation-dependent K-factor,
// and an additive channel-estimation error of total variance sigma_e2.
struct ChannelParams {
    double los_a = 11.95;          // LoS sigmoid shape
    double los_b = 0.14;           // LoS sigmoid slope (per degree)
    double rician_a1 = 1.0;        // K-factor scale
    double rician_a2 = 4.39;       // K-factor exponent (per radian, see kappa())
    double pathloss_exponent = 2.6;
    double nlos_attenuation = 0.2; // extra NLoS loss, in (0, 1]
    double carrier_hz = 2.0e9;     // free parameter, not pinned by the channel model
    int num_antennas = 4;
    double tx_power_w = 0.01;      // 10 dBm sensor transmit power
    double noise_psd = 1e-18;      // W/Hz (-150 dBm/Hz)
    double sigma_e2 = 0.0;         // channel estimation error variance (total)

    // Free-space power gain at 1 m, (4 pi f_c / c)^-2; derived so it can never
    // drift out of sync with carrier_hz.
    double unit_distance_gain() const;
};

struct ChannelRealization {
    std::vector<std::complex<double>> coeffs;     // true channel h
    std::vector<std::complex<double>> estimated;  // h_hat = h - e
    bool line_of_sight = false;

    double true_gain() const;       // ||h||^2
    double estimated_gain() const;  // ||h_hat||^2
};

// Propulsion power at horizontal speed V >= 0 (W).
double propulsion_power(const PropulsionParams& p, double speed);

// Elevation angle in degrees from a ground node to a UAV at the given
// horizontal distance and altitude; 90 when directly above.
double elevation_deg(double horizontal_dist, double altitude);

// Probability of a line-of-sight link, in (0, 1).
double los_probability(const ChannelParams& p, double horizontal_dist, double altitude);

// Draws one channel realization (large-scale LoS/NLoS pathloss, Rician
// small-scale fading, estimation error).  Channels are sampled once per
// hovering decision and held fixed for its duration.
ChannelRealization sample_channel(const ChannelParams& p, double horizontal_dist,
                                  double altitude, std::mt19937_64& rng);

// Upload rate b*log2(1 + gain*P_s/(b*N0)) under perfect CSI (bit/s).
double achievable_rate(double bandwidth_hz, double channel_gain, const ChannelParams& p);

// Upload rate with the estimation error treated as extra noise:
// b*log2(1 + est_gain*P_s/(P_s*sigma_e2 + b*N0)).  Reduces to achievable_rate
// when sigma_e2 = 0 and est_gain equals the true gain.
double robust_rate(double bandwidth_hz, double estimated_gain, const ChannelParams& p);

// Supremum of robust_rate over bandwidth: gain*P_s/(N0*ln 2).
double robust_rate_limit(double estimated_gain, const ChannelParams& p);

} // namespace uavsim::physics
