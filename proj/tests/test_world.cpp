#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "uavsim/learner.hpp"
#include "uavsim/world.hpp"

using namespace uavsim;
using namespace uavsim::world;

namespace {

double propulsion_reference(const physics::PropulsionParams& p, double v) {
    const double t1 =
        p.blade_profile_power * (1.0 + 3.0 * v * v / (p.rotor_tip_speed * p.rotor_tip_speed));
    const double inner =
        std::sqrt(1.0 + std::pow(v, 4) / (4.0 * std::pow(p.hover_induced_speed, 4))) -
        v * v / (2.0 * p.hover_induced_speed * p.hover_induced_speed);
    return t1 + p.induced_power * std::sqrt(inner) + p.parasite_coeff * v * v * v;
}

WorldConfig small_config(int h, int n_uavs) {
    WorldConfig cfg;
    cfg.grid.cells_per_side = h;
    cfg.num_uavs = n_uavs;
    cfg.velocities.assign(static_cast<size_t>(n_uavs), 10.0);
    cfg.e_max_j.assign(static_cast<size_t>(n_uavs), 1e6);
    return cfg;
}

Scenario empty_scenario(const GridSpec& grid) {
    Scenario s;
    s.cell_demand_bits.assign(static_cast<size_t>(grid.cell_count()), 0.0);
    return s;
}

Scenario single_sn_scenario(const GridSpec& grid, int cell, double demand) {
    Scenario s = empty_scenario(grid);
    SensorNode sn;
    sn.id = 0;
    sn.cell = cell;
    sn.x = grid.center_x(cell);
    sn.y = grid.center_y(cell);
    sn.demand_bits = demand;
    s.nodes.push_back(sn);
    s.cell_demand_bits[static_cast<size_t>(cell)] = demand;
    return s;
}

class ScriptedPolicy : public Policy {
  public:
    explicit ScriptedPolicy(std::vector<int> script) : script_(std::move(script)) {}
    int decide(const DecisionContext&) override { return script_.at(i_++); }

  private:
    std::vector<int> script_;
    size_t i_ = 0;
};

// Deterministic walker: first legal movement, never hovers.
class FirstLegalMove : public Policy {
  public:
    int decide(const DecisionContext& ctx) override {
        for (int a = kForward; a <= kLeft; ++a)
            if (ctx.mask[static_cast<size_t>(a)]) return a;
        return kReturnHome;
    }
};

class MaskRecorder : public Policy {
  public:
    struct Entry {
        int agent;
        std::array<bool, 5> mask;
        int action;
    };
    std::vector<Entry> entries;

    int decide(const DecisionContext& ctx) override {
        int a = kHover;
        while (a <= kLeft && !ctx.mask[static_cast<size_t>(a)]) ++a;
        entries.push_back({ctx.agent, ctx.mask, a});
        return a;
    }
};

} // namespace

TEST_CASE("discount chord limits") {
    CHECK(discount_chord(0.99, 0.0) == 0.0);
    CHECK(discount_chord(0.99, 1e-12) == doctest::Approx(0.0).epsilon(1e-9));
    const double chord5 = discount_chord(0.99, 5.0);
    CHECK(chord5 == doctest::Approx((std::pow(0.99, 5.0) - 1.0) / std::log(0.99)).epsilon(1e-15));
    CHECK(chord5 == doctest::Approx(4.876450).epsilon(1e-6));
    CHECK(semi_markov_reward(0.99, 5.0, -0.01) == doctest::Approx(-0.04876450).epsilon(1e-6));
    CHECK(semi_markov_reward(0.99, 5.0, 2.0 * -0.01) ==
          doctest::Approx(2.0 * -0.01 * chord5).epsilon(1e-12));
}

TEST_CASE("legal actions: reverse move masked, walls masked") {
    WorldConfig cfg = small_config(8, 1);
    World w(cfg);
    w.reset(empty_scenario(cfg.grid), 1);
    UavAgent& a = w.agent(0);

    a.cell = cfg.grid.cell_index(3, 3);
    a.last_action = kForward;
    auto mask = w.legal_actions(0, std::nullopt);
    CHECK(!mask[kHover]); // empty cell
    CHECK(mask[kForward]);
    CHECK(mask[kRight]);
    CHECK(!mask[kBackward]); // reverse of forward
    CHECK(mask[kLeft]);

    // hover between the pair breaks the "consecutive" rule
    a.last_action = kHover;
    mask = w.legal_actions(0, std::nullopt);
    CHECK(mask[kBackward]);

    // top-left corner: forward (+row at top) and left leave the grid
    a.cell = cfg.grid.cell_index(0, 7);
    a.last_action = -1;
    mask = w.legal_actions(0, std::nullopt);
    CHECK(!mask[kForward]);
    CHECK(!mask[kLeft]);
    CHECK(mask[kRight]);
    CHECK(mask[kBackward]);
}

TEST_CASE("legal actions: energy exactly at the post-move requirement masks the move") {
    WorldConfig cfg = small_config(8, 1);
    World w(cfg);
    w.reset(empty_scenario(cfg.grid), 1);
    UavAgent& a = w.agent(0);
    a.cell = cfg.grid.cell_index(3, 2);
    const int right_target = cfg.grid.cell_index(4, 2);
    a.energy_j = w.flight_energy_to_home(right_target, a.velocity) + cfg.safety_margin_j;
    auto mask = w.legal_actions(0, std::nullopt);
    CHECK(!mask[kRight]); // the flight itself still has to be paid for
    // Plenty of energy: everything but hover opens up.
    a.energy_j = 1e6;
    mask = w.legal_actions(0, std::nullopt);
    CHECK(mask[kRight]);
}

TEST_CASE("move and hover durations") {
    WorldConfig cfg = small_config(8, 1);
    World w(cfg);
    cfg.grid.validate();
    w.reset(single_sn_scenario(cfg.grid, 0, 1e6), 1);
    CHECK(w.move_duration(0) == doctest::Approx(5.0)); // 50 m at 10 m/s

    // gain chosen so the full 1 MHz band gives exactly 1 Mbit/s
    w.set_channel_fn([](const SensorNode&, double, std::mt19937_64&) { return 1e-10; });
    const HoverPlan plan = w.plan_hover(0);
    CHECK(plan.duration_s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(plan.rate_sum == doctest::Approx(1e6).epsilon(1e-12));
}

TEST_CASE("hover duration is the slowest SN with equal bandwidth") {
    WorldConfig cfg = small_config(8, 1);
    World w(cfg);
    Scenario s = empty_scenario(cfg.grid);
    for (int i = 0; i < 2; ++i) {
        SensorNode sn;
        sn.id = i;
        sn.cell = 0;
        sn.x = cfg.grid.center_x(0);
        sn.y = cfg.grid.center_y(0);
        sn.demand_bits = i == 0 ? 1e6 : 0.5e6;
        s.nodes.push_back(sn);
        s.cell_demand_bits[0] += sn.demand_bits;
    }
    w.reset(s, 1);
    // Each SN gets 0.5 MHz; gain tuned for exactly 1 Mbit/s per SN: SNR 3.
    w.set_channel_fn([](const SensorNode&, double, std::mt19937_64&) { return 1.5e-10; });
    const HoverPlan plan = w.plan_hover(0);
    CHECK(plan.duration_s == doctest::Approx(1.0).epsilon(1e-9)); // max(1.0, 0.5)
    CHECK(plan.rate_sum == doctest::Approx(2e6).epsilon(1e-9));
}

TEST_CASE("message exchange ORs maps within range and records peer positions") {
    WorldConfig cfg = small_config(8, 2);
    World w(cfg);
    w.reset(empty_scenario(cfg.grid), 1);
    // Fresh maps were already marked around the shared start cell; rebuild two
    // distinct maps by hand.
    w.agent(0).map = BitGrid(64);
    w.agent(1).map = BitGrid(64);
    w.agent(0).map.set(3);
    w.agent(1).map.set(5);

    w.agent(0).cell = cfg.grid.cell_index(0, 0);
    w.agent(1).cell = cfg.grid.cell_index(3, 0); // 150 m apart, within 200 m
    w.exchange_messages();
    CHECK(w.agent(0).map.get(3));
    CHECK(w.agent(0).map.get(5));
    CHECK(w.agent(1).map.get(3));
    CHECK(w.agent(1).map.get(5));
    CHECK(w.agent(0).known_peer_cell[1] == cfg.grid.cell_index(3, 0));
    CHECK(w.agent(1).known_peer_cell[0] == cfg.grid.cell_index(0, 0));

    // out of range: no sharing
    w.agent(0).map = BitGrid(64);
    w.agent(1).map = BitGrid(64);
    w.agent(0).map.set(7);
    w.agent(1).cell = cfg.grid.cell_index(7, 7);
    w.exchange_messages();
    CHECK(!w.agent(1).map.get(7));

    // all-ones maps are a fixed point
    for (int c = 0; c < 64; ++c) {
        w.agent(0).map.set(c);
        w.agent(1).map.set(c);
    }
    w.agent(1).cell = cfg.grid.cell_index(1, 0);
    w.exchange_messages();
    CHECK(w.agent(0).map.all_set());
    CHECK(w.agent(1).map.all_set());
}

TEST_CASE("zero communication range disables exchange even when co-located") {
    WorldConfig cfg = small_config(8, 2);
    cfg.comm_range_m = 0.0;
    World w(cfg);
    w.reset(empty_scenario(cfg.grid), 1);
    w.agent(0).map = BitGrid(64);
    w.agent(1).map = BitGrid(64);
    w.agent(0).map.set(9);
    w.exchange_messages();
    CHECK(!w.agent(1).map.get(9));
}

TEST_CASE("termination rule: complete map or no safe action") {
    WorldConfig cfg = small_config(8, 1);
    World w(cfg);
    w.reset(empty_scenario(cfg.grid), 1);
    UavAgent& a = w.agent(0);

    auto mask = w.legal_actions(0, std::nullopt);
    CHECK(!w.must_return_home(0, mask)); // fresh agent, full battery

    for (int c = 0; c < 64; ++c) a.map.set(c);
    CHECK(w.must_return_home(0, mask)); // map complete

    w.reset(empty_scenario(cfg.grid), 1);
    UavAgent& b = w.agent(0);
    b.cell = cfg.grid.cell_index(3, 2);
    b.energy_j = w.flight_energy_to_home(b.cell, b.velocity) + cfg.safety_margin_j;
    mask = w.legal_actions(0, std::nullopt);
    CHECK(w.must_return_home(0, mask)); // nothing is affordable any more
}

TEST_CASE("single walker produces an arithmetic event progression") {
    WorldConfig cfg = small_config(8, 1);
    World w(cfg);
    // forward seven times up the first column, then go home
    std::vector<int> script(7, kForward);
    script.push_back(kReturnHome);
    ScriptedPolicy policy(script);
    const EpisodeRecord rec = w.run_episode(empty_scenario(cfg.grid), policy, 1);
    REQUIRE(rec.steps.size() >= 7);
    for (int j = 0; j < 7; ++j) CHECK(rec.steps[static_cast<size_t>(j)].duration == doctest::Approx(5.0));
    // the return leg covers 7 cells of distance
    CHECK(rec.steps.back().duration == doctest::Approx(7.0 * 50.0 / 10.0));
    CHECK(rec.metrics.completion_time_s == doctest::Approx(7 * 5.0 + 35.0));
}

TEST_CASE("event queue processes the earliest finisher, ties by id") {
    WorldConfig cfg = small_config(8, 2);
    cfg.velocities = {50.0 / 3.0, 10.0}; // 3 s and 5 s moves
    World w(cfg);
    FirstLegalMove policy;
    const EpisodeRecord rec = w.run_episode(empty_scenario(cfg.grid), policy, 1);
    // expected decider order: 3s agent, 5s agent, 3s twice, 5s, 3s
    std::vector<int> deciders;
    for (int j = 1; deciders.size() < 6; ++j)
        for (int n = 0; n < 2; ++n)
            for (const auto& dp : rec.decisions[static_cast<size_t>(n)])
                if (dp.step == j) deciders.push_back(n);
    CHECK(deciders == std::vector<int>{0, 1, 0, 0, 1, 0});

    // equal speeds tie at multiples of both durations; lower id first, zero gap
    WorldConfig cfg2 = small_config(8, 2);
    cfg2.velocities = {10.0, 5.0};
    World w2(cfg2);
    FirstLegalMove policy2;
    const EpisodeRecord rec2 = w2.run_episode(empty_scenario(cfg2.grid), policy2, 1);
    REQUIRE(rec2.steps.size() >= 3);
    CHECK(rec2.steps[0].duration == doctest::Approx(5.0));
    CHECK(rec2.steps[1].duration == doctest::Approx(5.0));
    CHECK(rec2.steps[2].duration == doctest::Approx(0.0));
    CHECK(rec2.steps[2].reward == 0.0);
}

TEST_CASE("hand-simulated two-cell episode matches exactly") {
    WorldConfig cfg = small_config(2, 1);
    World w(cfg);
    w.set_channel_fn([](const SensorNode&, double, std::mt19937_64&) { return 1e-10; });
    ScriptedPolicy policy({kRight, kHover});
    const EpisodeRecord rec = w.run_episode(single_sn_scenario(cfg.grid, 1, 1e6), policy, 1);

    const double p_move = propulsion_reference(cfg.propulsion, 10.0);
    const double p_hover = propulsion_reference(cfg.propulsion, 0.0);
    const double psi = p_move * 5.0 + p_hover * 1.0 + p_move * 5.0;

    REQUIRE(rec.steps.size() == 3);
    CHECK(rec.steps[0].duration == doctest::Approx(5.0));
    CHECK(rec.steps[1].duration == doctest::Approx(1.0));
    CHECK(rec.steps[2].duration == doctest::Approx(5.0));

    CHECK(rec.steps[0].reward ==
          doctest::Approx(test_oracles::reward_closed_form(0.99, 5.0, -0.01, 0.0)).epsilon(1e-12));
    CHECK(rec.steps[1].reward ==
          doctest::Approx(test_oracles::reward_closed_form(0.99, 1.0, 1.0, 0.0)).epsilon(1e-12));
    const double bonus = 1e6 * (1.0 / psi); // alpha * Gamma with data in Mbit units
    CHECK(rec.steps[2].reward ==
          doctest::Approx(test_oracles::reward_closed_form(0.99, 5.0, -0.01, bonus)).epsilon(1e-12));
    CHECK(rec.steps[2].terminal);

    CHECK(rec.metrics.collected_bits == doctest::Approx(1e6));
    CHECK(rec.metrics.collected_pct == doctest::Approx(100.0));
    CHECK(rec.metrics.completion_time_s == doctest::Approx(11.0));
    CHECK(rec.metrics.energy_used_j[0] == doctest::Approx(psi).epsilon(1e-12));
    CHECK(rec.metrics.energy_efficiency == doctest::Approx(1e6 / psi).epsilon(1e-12));

    // inflight codes per interval: move, hover, return
    CHECK(rec.steps[0].inflight[0] == kRight);
    CHECK(rec.steps[1].inflight[0] == kHover);
    CHECK(rec.steps[2].inflight[0] == kReturnHome);
}

TEST_CASE("hover claims the cell so a second UAV observes zero demand") {
    WorldConfig cfg = small_config(8, 2);
    World w(cfg);
    w.set_channel_fn([](const SensorNode&, double, std::mt19937_64&) { return 1e-10; });
    MaskRecorder policy;
    const EpisodeRecord rec = w.run_episode(single_sn_scenario(cfg.grid, 0, 1e6), policy, 1);
    REQUIRE(policy.entries.size() >= 2);
    CHECK(policy.entries[0].agent == 0);
    CHECK(policy.entries[0].mask[kHover]);
    CHECK(policy.entries[0].action == kHover);
    CHECK(policy.entries[1].agent == 1);
    CHECK(!policy.entries[1].mask[kHover]); // demand already claimed at the same instant
    CHECK(rec.metrics.collected_bits == doctest::Approx(1e6));
}

TEST_CASE("illegal policy actions violate the contract") {
    WorldConfig cfg = small_config(8, 1);
    World w(cfg);
    ScriptedPolicy policy({kHover}); // hover on an empty cell is masked
    CHECK_THROWS_AS(w.run_episode(empty_scenario(cfg.grid), policy, 1), std::logic_error);
}

TEST_CASE("random episodes keep every environment invariant") {
    GridSpec grid;
    grid.cells_per_side = 5;
    grid.data_density = 0.4;
    WorldConfig cfg;
    cfg.grid = grid;
    cfg.num_uavs = 2;
    cfg.velocities = {5.0, 10.0};
    cfg.e_max_j = {150e3, 150e3};
    World w(cfg);

    std::mt19937_64 rng(99);
    for (int episode = 0; episode < 10; ++episode) {
        const Scenario sc = generate_scenario(grid, rng);
        aqmix::RandomPolicy policy(1000 + static_cast<uint64_t>(episode));
        const EpisodeRecord rec = w.run_episode(sc, policy, 77 + static_cast<uint64_t>(episode));

        // Energy bookkeeping: used energy decomposes exactly into hover and
        // flight power times the respective durations (Eq-style accounting).
        for (int n = 0; n < 2; ++n) {
            double hover_t = 0.0, flight_t = 0.0;
            for (const auto& st : rec.steps) {
                if (st.inflight[static_cast<size_t>(n)] == kHover)
                    hover_t += st.duration;
                else if (st.inflight[static_cast<size_t>(n)] <= kReturnHome)
                    flight_t += st.duration;
            }
            const double expected =
                propulsion_reference(cfg.propulsion, 0.0) * hover_t +
                propulsion_reference(cfg.propulsion, cfg.velocities[static_cast<size_t>(n)]) * flight_t;
            const double used = rec.metrics.energy_used_j[static_cast<size_t>(n)];
            CHECK(std::abs(used - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
            CHECK(used <= cfg.e_max_j[static_cast<size_t>(n)]); // never below zero left
        }

        // Demand conservation at episode end.
        double remaining = 0.0;
        for (int c = 0; c < grid.cell_count(); ++c) remaining += w.cell_demand(c);
        CHECK(std::abs(sc.total_demand_bits() - remaining - rec.metrics.collected_bits) <=
              1e-9 * std::max(1.0, sc.total_demand_bits()));

        // Monotone maps, no false positives, non-negative durations.
        const size_t words = rec.steps[0].state.map_words.size() / 3;
        for (size_t j = 0; j < rec.steps.size(); ++j) {
            const auto& st = rec.steps[j];
            CHECK(st.duration >= 0.0);
            if (st.duration == 0.0) CHECK(st.reward == 0.0);
            for (size_t mword = 0; mword < 2 * words; ++mword) {
                // agent map bit set implies the true map bit is set
                const uint64_t agent_bits = st.state.map_words[mword];
                const uint64_t true_bits = st.state.map_words[2 * words + (mword % words)];
                CHECK((agent_bits & ~true_bits) == 0);
                if (j > 0) {
                    const uint64_t before = rec.steps[j - 1].state.map_words[mword];
                    CHECK((before & ~agent_bits) == 0); // bits only flip 0 -> 1
                }
            }
        }

        // Exactly one fresh decision per step after the initial joint one,
        // except landing steps which decide nothing.
        std::vector<int> fresh(rec.steps.size() + 1, 0);
        for (const auto& lane : rec.decisions)
            for (const auto& dp : lane) ++fresh[static_cast<size_t>(dp.step)];
        CHECK(fresh[0] == 2);
        for (size_t j = 1; j < fresh.size(); ++j) CHECK(fresh[j] <= 1);

        // Episode ends exactly when everyone has landed.
        CHECK(rec.steps.back().terminal);
        for (const auto& a : w.agents()) CHECK(a.terminated);
        CHECK(rec.metrics.completion_time_s > 0.0);
    }
}

TEST_CASE("world rejects invalid configuration") {
    WorldConfig cfg = small_config(8, 2);
    cfg.gamma = 1.0;
    CHECK_THROWS_AS(World{cfg}, ConfigError);
    WorldConfig cfg2 = small_config(8, 2);
    cfg2.velocities = {10.0};
    CHECK_THROWS_AS(World{cfg2}, ConfigError);
}
