#pragma once

#include <vector>

namespace uavsim {

// Per-episode outcome summary; energy efficiency is raw bit/J, independent of
// the reward's data-unit scaling.
struct EpisodeMetrics {
    double total_reward = 0.0;        // discounted, in reward units
    double initial_demand_bits = 0.0;
    double collected_bits = 0.0;
    double collected_pct = 0.0;       // 0 when the scenario has no demand
    std::vector<double> energy_used_j; // per UAV
    double completion_time_s = 0.0;   // max over UAVs of terminal clock
    double energy_efficiency = 0.0;   // collected_bits / total energy
    int event_count = 0;

    double total_energy_j() const {
        double e = 0.0;
        for (double v : energy_used_j) e += v;
        return e;
    }
};

} // namespace uavsim
