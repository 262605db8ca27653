#pragma once

#include <limits>
#include <vector>

#include "uavsim/physics.hpp"

namespace uavsim::bandwidth {

// One per-cell FDMA allocation instance: every active SN must upload its
// whole demand within the hover, sharing the UAV's band budget.
struct AllocationProblem {
    std::vector<double> demand_bits;     // > 0 for every entry
    std::vector<double> estimated_gain;  // ||h_hat||^2 per SN
    double bandwidth_hz = 1e6;           // band budget B
    physics::ChannelParams channel;      // P_s, N0, sigma_e2

    void validate() const;
};

struct AllocationResult {
    std::vector<double> bandwidth_hz; // per SN
    double hover_time_s = 0.0;        // zeta
};

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kInfeasibleBandwidth = std::numeric_limits<double>::infinity();

// Smallest bandwidth whose robust rate meets demand/deadline, by bisection on
// the strictly increasing rate; kInfeasibleBandwidth when even infinite
// bandwidth cannot reach the required rate.
double min_bandwidth_for_deadline(double demand_bits, double estimated_gain,
                                  const physics::ChannelParams& channel, double deadline_s);

// Minimal hover time: outer bisection on the deadline, feasibility tested via
// the sum of per-SN minimal bandwidths against the budget.  Throws
// InfeasibleError when no finite deadline is feasible (e.g. a zero-gain SN).
AllocationResult optimize_allocation(const AllocationProblem& problem);

// Uniform split of the budget; the baseline scheme used during training.
AllocationResult equal_allocation(const AllocationProblem& problem);

// max_i demand_i / rate_i; shared by both schemes and by the hover-duration
// accounting in the environment.
double hover_time_from_rates(const std::vector<double>& demand_bits,
                             const std::vector<double>& rates);

} // namespace uavsim::bandwidth
