#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "uavsim/physics.hpp"

using namespace uavsim::physics;

namespace {

// Straightforward re-evaluation of the propulsion model, kept independent of
// the implementation under test.
double propulsion_reference(const PropulsionParams& p, double v) {
    const double t1 = p.blade_profile_power * (1.0 + 3.0 * v * v / (p.rotor_tip_speed * p.rotor_tip_speed));
    const double inner = std::sqrt(1.0 + std::pow(v, 4) / (4.0 * std::pow(p.hover_induced_speed, 4))) -
                         v * v / (2.0 * p.hover_induced_speed * p.hover_induced_speed);
    return t1 + p.induced_power * std::sqrt(inner) + p.parasite_coeff * v * v * v;
}

// Analytic derivative of the propulsion model.
double propulsion_derivative(const PropulsionParams& p, double v) {
    const double v0 = p.hover_induced_speed;
    const double a = std::sqrt(1.0 + std::pow(v, 4) / (4.0 * std::pow(v0, 4)));
    const double b = v * v / (2.0 * v0 * v0);
    const double da = std::pow(v, 3) / (2.0 * std::pow(v0, 4) * a);
    const double db = v / (v0 * v0);
    const double dt1 = 6.0 * p.blade_profile_power * v / (p.rotor_tip_speed * p.rotor_tip_speed);
    const double dt2 = p.induced_power * (da - db) / (2.0 * std::sqrt(a - b));
    return dt1 + dt2 + 3.0 * p.parasite_coeff * v * v;
}

} // namespace

TEST_CASE("propulsion power at V=0 is blade profile plus induced power") {
    PropulsionParams p;
    CHECK(propulsion_power(p, 0.0) == doctest::Approx(p.blade_profile_power + p.induced_power).epsilon(1e-12));
    CHECK(propulsion_power(p, 0.0) == doctest::Approx(p.hover_power()).epsilon(1e-12));
}

TEST_CASE("propulsion power at V=v0 with no parasite term and huge tip speed") {
    PropulsionParams p;
    p.parasite_coeff = 0.0;
    p.rotor_tip_speed = 1e12;
    const double expected =
        p.blade_profile_power + p.induced_power * std::sqrt(std::sqrt(5.0) / 2.0 - 0.5);
    CHECK(propulsion_power(p, p.hover_induced_speed) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("propulsion power matches an independent re-evaluation at V=10") {
    PropulsionParams p;
    CHECK(propulsion_power(p, 10.0) == doctest::Approx(propulsion_reference(p, 10.0)).epsilon(1e-12));
}

TEST_CASE("propulsion power is positive and its derivative matches the analytic one") {
    PropulsionParams p;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> speeds(0.1, 40.0);
    for (int i = 0; i < 100; ++i) {
        const double v = speeds(rng);
        CHECK(propulsion_power(p, v) > 0.0);
        const double h = 1e-5 * v;
        const double fd = (propulsion_power(p, v + h) - propulsion_power(p, v - h)) / (2.0 * h);
        const double exact = propulsion_derivative(p, v);
        CHECK(std::abs(fd - exact) / std::max(std::abs(exact), 1e-9) < 1e-6);
    }
}

TEST_CASE("LoS probability directly above matches the sigmoid at 90 degrees") {
    ChannelParams p;
    const double expected = 1.0 / (1.0 + p.los_a * std::exp(-p.los_b * (90.0 - p.los_a)));
    CHECK(los_probability(p, 0.0, 100.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(los_probability(p, 0.0, 100.0) == doctest::Approx(0.999786).epsilon(1e-5));
}

TEST_CASE("LoS probability equals 1/(1+a) when the elevation equals a degrees") {
    ChannelParams p;
    const double theta = p.los_a * std::numbers::pi / 180.0;
    const double altitude = 100.0;
    const double dist = altitude / std::tan(theta);
    CHECK(los_probability(p, dist, altitude) == doctest::Approx(1.0 / (1.0 + p.los_a)).epsilon(1e-9));
}

TEST_CASE("LoS probability stays in (0,1) and decreases with horizontal distance") {
    ChannelParams p;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> alts(20.0, 300.0);
    for (int i = 0; i < 50; ++i) {
        const double alt = alts(rng);
        double prev = los_probability(p, 0.0, alt);
        CHECK(prev > 0.0);
        CHECK(prev < 1.0);
        for (double d = 10.0; d < 2000.0; d *= 1.7) {
            const double cur = los_probability(p, d, alt);
            CHECK(cur < prev);
            CHECK(cur > 0.0);
            prev = cur;
        }
    }
}

TEST_CASE("channel samples with zero estimation error have exact estimates") {
    ChannelParams p;
    p.sigma_e2 = 0.0;
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto c = sample_channel(p, 120.0, 100.0, rng);
        for (size_t k = 0; k < c.coeffs.size(); ++k) CHECK(c.coeffs[k] == c.estimated[k]);
    }
}

TEST_CASE("degenerate Rician factor leaves only the deterministic component") {
    ChannelParams p;
    p.rician_a1 = 1e12; // kappa -> infinity
    std::mt19937_64 rng(2);
    const double d = 90.0, alt = 100.0;
    const double dist = std::sqrt(d * d + alt * alt);
    for (int i = 0; i < 50; ++i) {
        const auto c = sample_channel(p, d, alt, rng);
        const double alpha = p.unit_distance_gain() * std::pow(dist, -p.pathloss_exponent) *
                             (c.line_of_sight ? 1.0 : p.nlos_attenuation);
        CHECK(c.true_gain() / alpha == doctest::Approx(static_cast<double>(p.num_antennas)).epsilon(1e-6));
    }
}

TEST_CASE("Monte Carlo: mean small-scale gain is N_tx and LoS frequency matches") {
    ChannelParams p;
    std::mt19937_64 rng(3);
    const double d = 150.0, alt = 100.0;
    const double dist = std::sqrt(d * d + alt * alt);
    const double p_los = los_probability(p, d, alt);
    const int n = 100'000;
    double gain_sum = 0.0;
    int los_count = 0;
    for (int i = 0; i < n; ++i) {
        const auto c = sample_channel(p, d, alt, rng);
        const double alpha = p.unit_distance_gain() * std::pow(dist, -p.pathloss_exponent) *
                             (c.line_of_sight ? 1.0 : p.nlos_attenuation);
        gain_sum += c.true_gain() / alpha;
        los_count += c.line_of_sight ? 1 : 0;
    }
    CHECK(gain_sum / n == doctest::Approx(static_cast<double>(p.num_antennas)).epsilon(0.02));
    CHECK(std::abs(static_cast<double>(los_count) / n - p_los) < 0.01);
}

TEST_CASE("Monte Carlo: per-element estimation error variance is sigma_e2/N_tx") {
    ChannelParams p;
    p.sigma_e2 = 0.05;
    std::mt19937_64 rng(4);
    const int n = 100'000;
    double err_sq = 0.0;
    long count = 0;
    for (int i = 0; i < n; ++i) {
        const auto c = sample_channel(p, 100.0, 100.0, rng);
        for (size_t k = 0; k < c.coeffs.size(); ++k) {
            err_sq += std::norm(c.coeffs[k] - c.estimated[k]);
            ++count;
        }
    }
    CHECK(err_sq / static_cast<double>(count) ==
          doctest::Approx(p.sigma_e2 / p.num_antennas).epsilon(0.05));
}

TEST_CASE("rate is zero at zero gain and matches log2 at unit SNR") {
    ChannelParams p;
    CHECK(achievable_rate(1e6, 0.0, p) == 0.0);
    // gain*P_s/N0 = 1e6 with b = 1e6 gives SNR 1 and rate b*log2(2) = b.
    const double gain = 1e6 * p.noise_psd / p.tx_power_w;
    CHECK(achievable_rate(1e6, gain, p) == doctest::Approx(1e6).epsilon(1e-12));
    CHECK_THROWS_AS(achievable_rate(0.0, 1.0, p), std::domain_error);
}

TEST_CASE("doubling bandwidth in the high-SNR regime less than doubles the rate") {
    ChannelParams p;
    const double gain = 1e9 * p.noise_psd / p.tx_power_w; // SNR 1000 at b=1e6
    const double r1 = achievable_rate(1e6, gain, p);
    const double r2 = achievable_rate(2e6, gain, p);
    CHECK(r2 > r1);
    CHECK(r2 < 2.0 * r1);
}

TEST_CASE("robust rate reduces to the perfect-CSI rate and shrinks with error") {
    ChannelParams p;
    const double gain = 3e-9;
    p.sigma_e2 = 0.0;
    CHECK(robust_rate(1e6, gain, p) == doctest::Approx(achievable_rate(1e6, gain, p)).epsilon(1e-12));
    ChannelParams noisy = p;
    noisy.sigma_e2 = 0.01;
    CHECK(robust_rate(1e6, gain, noisy) < robust_rate(1e6, gain, p));
    noisy.sigma_e2 = 1e12;
    CHECK(robust_rate(1e6, gain, noisy) < 1e-3);
}

TEST_CASE("robust rate is strictly increasing and concave in bandwidth") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> log_gain(-10.0, -6.0);
    std::uniform_real_distribution<double> sigma(0.0, 0.05);
    std::uniform_real_distribution<double> bw(1e4, 2e6);
    for (int i = 0; i < 1000; ++i) {
        ChannelParams p;
        p.sigma_e2 = sigma(rng);
        const double gain = std::pow(10.0, log_gain(rng));
        double b1 = bw(rng), b2 = bw(rng), b3 = bw(rng);
        if (b1 > b2) std::swap(b1, b2);
        if (b2 > b3) std::swap(b2, b3);
        if (b1 > b2) std::swap(b1, b2);
        if (b1 == b2 || b2 == b3) continue;
        const double r1 = robust_rate(b1, gain, p);
        const double r2 = robust_rate(b2, gain, p);
        const double r3 = robust_rate(b3, gain, p);
        CHECK(r1 < r2);
        CHECK(r2 < r3);
        // chord test: f(b2) must be above the line through (b1,f1),(b3,f3)
        const double t = (b2 - b1) / (b3 - b1);
        CHECK(r2 >= (1.0 - t) * r1 + t * r3 - 1e-9 * std::abs(r3));
    }
}

TEST_CASE("unit-distance gain tracks the carrier frequency") {
    ChannelParams p;
    const double c = 299'792'458.0;
    const double expected = std::pow(4.0 * std::numbers::pi * p.carrier_hz / c, -2.0);
    CHECK(p.unit_distance_gain() == doctest::Approx(expected).epsilon(1e-12));
}
