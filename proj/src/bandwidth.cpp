#include "uavsim/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsim::bandwidth {

namespace {
constexpr double kBandRelTol = 1e-9;
constexpr double kZetaRelTol = 1e-6;
} // namespace

void AllocationProblem::validate() const {
    if (demand_bits.empty()) throw std::invalid_argument("allocation: no SNs");
    if (demand_bits.size() != estimated_gain.size())
        throw std::invalid_argument("allocation: demand/gain size mismatch");
    if (bandwidth_hz <= 0.0) throw std::invalid_argument("allocation: budget must be > 0");
    for (double d : demand_bits)
        if (d <= 0.0) throw std::invalid_argument("allocation: demands must be > 0");
}

double min_bandwidth_for_deadline(double demand_bits, double estimated_gain,
                                  const physics::ChannelParams& channel, double deadline_s) {
    if (deadline_s <= 0.0) throw std::domain_error("min_bandwidth_for_deadline: deadline must be > 0");
    const double target_rate = demand_bits / deadline_s;
    if (estimated_gain <= 0.0) return kInfeasibleBandwidth;
    if (target_rate >= physics::robust_rate_limit(estimated_gain, channel))
        return kInfeasibleBandwidth;

    // Bracket, then bisect on the strictly increasing rate(b).
    double hi = 1.0;
    while (physics::robust_rate(hi, estimated_gain, channel) < target_rate) hi *= 2.0;
    double lo = 0.0;
    while (hi - lo > kBandRelTol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (physics::robust_rate(mid, estimated_gain, channel) >= target_rate)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

namespace {

// Sum of minimal per-SN bandwidths at a candidate deadline; infinity when any
// SN cannot meet it at all.
double required_band(const AllocationProblem& p, double zeta) {
    double total = 0.0;
    for (size_t i = 0; i < p.demand_bits.size(); ++i) {
        const double b =
            min_bandwidth_for_deadline(p.demand_bits[i], p.estimated_gain[i], p.channel, zeta);
        if (b == kInfeasibleBandwidth) return kInfeasibleBandwidth;
        total += b;
    }
    return total;
}

} // namespace

AllocationResult optimize_allocation(const AllocationProblem& p) {
    p.validate();
    for (double g : p.estimated_gain)
        if (g <= 0.0) throw InfeasibleError("allocation: SN with zero estimated gain");

    const size_t n = p.demand_bits.size();

    // zeta below lo is infeasible even with the whole budget on one SN; the
    // equal split gives a feasible upper bound (widened if rounding bites).
    double lo = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = physics::robust_rate(p.bandwidth_hz, p.estimated_gain[i], p.channel);
        lo = std::max(lo, p.demand_bits[i] / r);
    }
    double hi = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r =
            physics::robust_rate(p.bandwidth_hz / static_cast<double>(n), p.estimated_gain[i], p.channel);
        if (r <= 0.0) throw InfeasibleError("allocation: SN with vanishing rate");
        hi = std::max(hi, p.demand_bits[i] / r);
    }
    int guard = 0;
    while (required_band(p, hi) > p.bandwidth_hz) {
        hi *= 2.0;
        if (++guard > 200) throw InfeasibleError("allocation: no feasible hover time");
    }

    while (hi - lo > kZetaRelTol * hi) {
        const double mid = 0.5 * (lo + hi);
        const double need = required_band(p, mid);
        if (need <= p.bandwidth_hz)
            hi = mid;
        else
            lo = mid;
    }

    AllocationResult out;
    out.hover_time_s = hi;
    out.bandwidth_hz.resize(n);
    for (size_t i = 0; i < n; ++i)
        out.bandwidth_hz[i] =
            min_bandwidth_for_deadline(p.demand_bits[i], p.estimated_gain[i], p.channel, hi);
    return out;
}

AllocationResult equal_allocation(const AllocationProblem& p) {
    p.validate();
    const size_t n = p.demand_bits.size();
    const double share = p.bandwidth_hz / static_cast<double>(n);
    AllocationResult out;
    out.bandwidth_hz.assign(n, share);
    std::vector<double> rates(n);
    for (size_t i = 0; i < n; ++i)
        rates[i] = physics::robust_rate(share, p.estimated_gain[i], p.channel);
    out.hover_time_s = hover_time_from_rates(p.demand_bits, rates);
    return out;
}

double hover_time_from_rates(const std::vector<double>& demand_bits,
                             const std::vector<double>& rates) {
    if (demand_bits.empty()) throw std::domain_error("hover_time_from_rates: no SNs");
    double t = 0.0;
    for (size_t i = 0; i < demand_bits.size(); ++i) {
        if (rates[i] <= 0.0) return std::numeric_limits<double>::infinity();
        t = std::max(t, demand_bits[i] / rates[i]);
    }
    return t;
}

} // namespace uavsim::bandwidth
