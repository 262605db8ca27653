#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "uavsim/bandwidth.hpp"

using namespace uavsim;
using namespace uavsim::bandwidth;

namespace {

AllocationProblem random_problem(std::mt19937_64& rng, int max_sns, double sigma_e2 = 0.0) {
    std::uniform_int_distribution<int> count(1, max_sns);
    std::uniform_real_distribution<double> demand(0.1e6, 1.0e6);
    std::uniform_real_distribution<double> log_gain(-9.5, -7.5);
    AllocationProblem p;
    p.bandwidth_hz = 1e6;
    p.channel.sigma_e2 = sigma_e2;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        p.demand_bits.push_back(demand(rng));
        p.estimated_gain.push_back(std::pow(10.0, log_gain(rng)));
    }
    return p;
}

} // namespace

TEST_CASE("min bandwidth inverts the rate exactly") {
    physics::ChannelParams chan;
    chan.sigma_e2 = 0.01;
    const double gain = 3e-9;
    const double b_star = 4.2e5;
    const double rate = physics::robust_rate(b_star, gain, chan);
    const double demand = 0.7e6;
    const double zeta = demand / rate; // deadline engineered so b* is the answer
    const double b = min_bandwidth_for_deadline(demand, gain, chan, zeta);
    CHECK(b == doctest::Approx(b_star).epsilon(1e-8));
}

TEST_CASE("required bandwidth vanishes as the deadline grows") {
    physics::ChannelParams chan;
    const double gain = 3e-9;
    double prev = min_bandwidth_for_deadline(1e6, gain, chan, 1.0);
    for (double zeta = 10.0; zeta <= 1e6; zeta *= 10.0) {
        const double b = min_bandwidth_for_deadline(1e6, gain, chan, zeta);
        CHECK(b < prev);
        prev = b;
    }
    CHECK(prev < 1.0);
}

TEST_CASE("demands above the infinite-bandwidth rate limit are infeasible") {
    physics::ChannelParams chan;
    chan.sigma_e2 = 0.02;
    const double gain = 3e-9;
    const double limit = physics::robust_rate_limit(gain, chan);
    CHECK(min_bandwidth_for_deadline(limit * 1.01, gain, chan, 1.0) == kInfeasibleBandwidth);
    CHECK(min_bandwidth_for_deadline(limit * 0.50, gain, chan, 1.0) < kInfeasibleBandwidth);
    CHECK_THROWS_AS(min_bandwidth_for_deadline(1.0, gain, chan, 0.0), std::domain_error);
}

TEST_CASE("single SN gets the whole band") {
    AllocationProblem p;
    p.demand_bits = {0.5e6};
    p.estimated_gain = {2e-9};
    const auto res = optimize_allocation(p);
    const double rate = physics::robust_rate(p.bandwidth_hz, p.estimated_gain[0], p.channel);
    CHECK(res.hover_time_s == doctest::Approx(p.demand_bits[0] / rate).epsilon(1e-5));
    const auto eq = equal_allocation(p);
    CHECK(eq.hover_time_s == doctest::Approx(res.hover_time_s).epsilon(1e-5));
}

TEST_CASE("identical SNs split the band evenly") {
    AllocationProblem p;
    for (int i = 0; i < 3; ++i) {
        p.demand_bits.push_back(0.8e6);
        p.estimated_gain.push_back(3e-9);
    }
    const auto res = optimize_allocation(p);
    const auto eq = equal_allocation(p);
    CHECK(res.hover_time_s == doctest::Approx(eq.hover_time_s).epsilon(1e-4));
    for (double b : res.bandwidth_hz)
        CHECK(b == doctest::Approx(p.bandwidth_hz / 3.0).epsilon(1e-3));
}

TEST_CASE("three heterogeneous SNs match the refined grid-search oracle") {
    AllocationProblem p;
    p.demand_bits = {0.9e6, 0.3e6, 0.6e6};
    p.estimated_gain = {1.2e-9, 4.0e-9, 2.2e-9};
    p.channel.sigma_e2 = 0.01;
    const auto res = optimize_allocation(p);
    const double oracle = test_oracles::grid_search_hover_time(p, 120);
    CHECK(res.hover_time_s == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("allocation result satisfies its own contracts on random instances") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const AllocationProblem p = random_problem(rng, 6, 0.005);
        const auto res = optimize_allocation(p);
        double used = 0.0;
        for (size_t k = 0; k < res.bandwidth_hz.size(); ++k) {
            CHECK(res.bandwidth_hz[k] > 0.0);
            used += res.bandwidth_hz[k];
            const double rate = physics::robust_rate(res.bandwidth_hz[k], p.estimated_gain[k], p.channel);
            // every SN finishes within zeta
            CHECK(p.demand_bits[k] / rate <= res.hover_time_s * (1.0 + 1e-6));
        }
        CHECK(used <= p.bandwidth_hz * (1.0 + 1e-6));
    }
}

TEST_CASE("equal allocation never beats the optimum and ties on symmetric instances") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 1000; ++i) {
        const AllocationProblem p = random_problem(rng, 6, 0.002);
        const auto opt = optimize_allocation(p);
        const auto eq = equal_allocation(p);
        CHECK(opt.hover_time_s <= eq.hover_time_s * (1.0 + 1e-6));
    }
}

TEST_CASE("active-budget optimum equalizes per-SN finish times") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 100; ++i) {
        AllocationProblem p = random_problem(rng, 4, 0.01);
        if (p.demand_bits.size() < 2) continue;
        const auto res = optimize_allocation(p);
        double used = 0.0;
        for (double b : res.bandwidth_hz) used += b;
        if (used < 0.99 * p.bandwidth_hz) continue; // budget not binding
        for (size_t k = 0; k < res.bandwidth_hz.size(); ++k) {
            const double rate = physics::robust_rate(res.bandwidth_hz[k], p.estimated_gain[k], p.channel);
            CHECK(p.demand_bits[k] / rate == doctest::Approx(res.hover_time_s).epsilon(1e-4));
        }
    }
}

TEST_CASE("hover time is monotone in budget and demand") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 50; ++i) {
        AllocationProblem p = random_problem(rng, 4, 0.01);
        const double base = optimize_allocation(p).hover_time_s;
        AllocationProblem more_band = p;
        more_band.bandwidth_hz *= 1.5;
        CHECK(optimize_allocation(more_band).hover_time_s <= base * (1.0 + 1e-5));
        AllocationProblem more_demand = p;
        more_demand.demand_bits[0] *= 1.5;
        CHECK(optimize_allocation(more_demand).hover_time_s >= base * (1.0 - 1e-5));
    }
}

TEST_CASE("zero estimated gain is reported infeasible, not dropped") {
    AllocationProblem p;
    p.demand_bits = {0.5e6, 0.5e6};
    p.estimated_gain = {2e-9, 0.0};
    CHECK_THROWS_AS(optimize_allocation(p), InfeasibleError);
}

TEST_CASE("problem validation rejects malformed instances") {
    AllocationProblem p;
    CHECK_THROWS(optimize_allocation(p)); // no SNs
    p.demand_bits = {1.0, -1.0};
    p.estimated_gain = {1e-9, 1e-9};
    CHECK_THROWS(optimize_allocation(p)); // non-positive demand
}

TEST_CASE("hover_time_from_rates is the slowest SN's upload time") {
    CHECK(bandwidth::hover_time_from_rates({1e6}, {1e6}) == doctest::Approx(1.0));
    CHECK(bandwidth::hover_time_from_rates({1e6, 0.5e6}, {1e6, 1e6}) == doctest::Approx(1.0));
    CHECK(bandwidth::hover_time_from_rates({1e6, 2e6}, {1e6, 1e6}) == doctest::Approx(2.0));
}
