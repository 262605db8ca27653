#pragma once

// Independent test oracles.  Everything here recomputes expected values from
// first principles and must stay decoupled from the implementation paths it
// checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "uavsim/bandwidth.hpp"
#include "uavsim/physics.hpp"

namespace test_oracles {

// Closed-form reward factor of one action interval, re-derived from the
// discounted integral of a constant instantaneous reward.
inline double reward_closed_form(double gamma, double tau, double phi_sum, double terminal_bonus) {
    const double chord = tau > 0.0 ? (std::pow(gamma, tau) - 1.0) / std::log(gamma) : 0.0;
    return chord * phi_sum + std::pow(gamma, tau) * terminal_bonus;
}

// Hover time at a given split of the band.
inline double hover_time_of_split(const uavsim::bandwidth::AllocationProblem& p,
                                  const std::vector<double>& bands) {
    double t = 0.0;
    for (size_t i = 0; i < bands.size(); ++i) {
        if (bands[i] <= 0.0) return std::numeric_limits<double>::infinity();
        const double r = uavsim::physics::robust_rate(bands[i], p.estimated_gain[i], p.channel);
        t = std::max(t, p.demand_bits[i] / r);
    }
    return t;
}

// Exhaustive simplex grid search for the minimal hover time, refined around
// the incumbent in three stages.  Supports up to 4 SNs.
inline double grid_search_hover_time(const uavsim::bandwidth::AllocationProblem& p, int steps) {
    const size_t n = p.demand_bits.size();
    if (n > 4) throw std::invalid_argument("grid oracle supports at most 4 SNs");

    std::vector<double> lo(n, 0.0), hi(n, p.bandwidth_hz);
    std::vector<double> best_bands(n, p.bandwidth_hz / static_cast<double>(n));
    double best = hover_time_of_split(p, best_bands);

    for (int stage = 0; stage < 3; ++stage) {
        std::vector<double> bands(n);
        std::function<void(size_t, double)> enumerate = [&](size_t i, double used) {
            if (i == n - 1) {
                const double last = p.bandwidth_hz - used;
                if (last < lo[i] || last > hi[i]) return;
                bands[i] = last;
                const double t = hover_time_of_split(p, bands);
                if (t < best) {
                    best = t;
                    best_bands = bands;
                }
                return;
            }
            for (int k = 0; k <= steps; ++k) {
                const double b = lo[i] + (hi[i] - lo[i]) * k / steps;
                if (used + b > p.bandwidth_hz) break;
                bands[i] = b;
                enumerate(i + 1, used + b);
            }
        };
        enumerate(0, 0.0);
        // shrink the box around the incumbent for the next stage
        for (size_t i = 0; i < n; ++i) {
            const double span = (hi[i] - lo[i]) / steps;
            lo[i] = std::max(0.0, best_bands[i] - 2.0 * span);
            hi[i] = std::min(p.bandwidth_hz, best_bands[i] + 2.0 * span);
        }
    }
    return best;
}

} // namespace test_oracles
