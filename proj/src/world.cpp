#include "uavsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsim::world {

namespace {
constexpr int kHomeCell = 0;
constexpr double kMovePenalty = -0.01;
} // namespace

void WorldConfig::validate() const {
    grid.validate();
    if (num_uavs < 1) throw ConfigError("world: num_uavs must be >= 1");
    if (static_cast<int>(velocities.size()) != num_uavs)
        throw ConfigError("world: one velocity per UAV required");
    if (static_cast<int>(e_max_j.size()) != num_uavs)
        throw ConfigError("world: one energy budget per UAV required");
    for (double v : velocities)
        if (v <= 0.0) throw ConfigError("world: velocities must be > 0");
    for (double e : e_max_j)
        if (e <= 0.0) throw ConfigError("world: energy budgets must be > 0");
    if (gamma <= 0.0 || gamma >= 1.0) throw ConfigError("world: gamma must be in (0,1)");
    if (reward_data_unit_bits <= 0.0) throw ConfigError("world: reward data unit must be > 0");
    if (bandwidth_hz <= 0.0) throw ConfigError("world: bandwidth must be > 0");
    if (comm_range_m < 0.0) throw ConfigError("world: comm range must be >= 0");
    if (safety_margin_j < 0.0) throw ConfigError("world: safety margin must be >= 0");
}

double discount_chord(double gamma, double tau) {
    if (tau <= 0.0) return 0.0;
    return (std::pow(gamma, tau) - 1.0) / std::log(gamma);
}

double semi_markov_reward(double gamma, double tau, double phi_sum) {
    return discount_chord(gamma, tau) * phi_sum;
}

World::World(WorldConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    channel_fn_ = [this](const SensorNode&, double horizontal_dist, std::mt19937_64& rng) {
        return physics::sample_channel(cfg_.channel, horizontal_dist, cfg_.grid.altitude_m, rng)
            .estimated_gain();
    };
}

void World::reset(const Scenario& scenario, uint64_t channel_seed) {
    scenario_ = scenario;
    cell_demand_ = scenario.cell_demand_bits;
    const int n_cells = cfg_.grid.cell_count();
    cell_sns_.assign(static_cast<size_t>(n_cells), {});
    for (const auto& sn : scenario_.nodes)
        cell_sns_[static_cast<size_t>(sn.cell)].push_back(sn.id);

    agents_.clear();
    agents_.resize(static_cast<size_t>(cfg_.num_uavs));
    for (int n = 0; n < cfg_.num_uavs; ++n) {
        UavAgent& a = agents_[static_cast<size_t>(n)];
        a.id = n;
        a.cell = kHomeCell;
        a.e_max_j = cfg_.e_max_j[static_cast<size_t>(n)];
        a.energy_j = a.e_max_j;
        a.velocity = cfg_.velocities[static_cast<size_t>(n)];
        a.map = BitGrid(n_cells);
        a.known_peer_cell.assign(static_cast<size_t>(cfg_.num_uavs), -1);
        a.pending = kDone;
    }
    clock_ = 0.0;
    collected_bits_ = 0.0;
    initial_demand_ = scenario.total_demand_bits();
    total_reward_ = 0.0;
    chan_rng_.seed(channel_seed);
}

double World::flight_time_to_home(int cell, double velocity) const {
    const double dx = cfg_.grid.center_x(cell) - cfg_.grid.center_x(kHomeCell);
    const double dy = cfg_.grid.center_y(cell) - cfg_.grid.center_y(kHomeCell);
    return std::sqrt(dx * dx + dy * dy) / velocity;
}

double World::flight_energy_to_home(int cell, double velocity) const {
    return physics::propulsion_power(cfg_.propulsion, velocity) * flight_time_to_home(cell, velocity);
}

double World::move_duration(int agent_id) const {
    return cfg_.grid.cell_size_m / agents_[static_cast<size_t>(agent_id)].velocity;
}

HoverPlan World::plan_hover(int agent_id) {
    const UavAgent& a = agents_[static_cast<size_t>(agent_id)];
    const double ux = cfg_.grid.center_x(a.cell);
    const double uy = cfg_.grid.center_y(a.cell);

    bandwidth::AllocationProblem problem;
    problem.bandwidth_hz = cfg_.bandwidth_hz;
    problem.channel = cfg_.channel;
    for (int sn_id : cell_sns_[static_cast<size_t>(a.cell)]) {
        const SensorNode& sn = scenario_.nodes[static_cast<size_t>(sn_id)];
        if (sn.demand_bits <= 0.0) continue;
        const double dist = std::hypot(sn.x - ux, sn.y - uy);
        problem.demand_bits.push_back(sn.demand_bits);
        problem.estimated_gain.push_back(channel_fn_(sn, dist, chan_rng_));
    }
    if (problem.demand_bits.empty())
        throw std::domain_error("plan_hover: no active SN in cell");

    const bandwidth::AllocationResult alloc = cfg_.allocation == AllocationScheme::kOptimal
                                                  ? bandwidth::optimize_allocation(problem)
                                                  : bandwidth::equal_allocation(problem);
    std::vector<double> rates(problem.demand_bits.size());
    HoverPlan plan;
    for (size_t i = 0; i < rates.size(); ++i) {
        rates[i] = physics::robust_rate(alloc.bandwidth_hz[i], problem.estimated_gain[i], cfg_.channel);
        plan.rate_sum += rates[i];
    }
    plan.duration_s = bandwidth::hover_time_from_rates(problem.demand_bits, rates);
    plan.energy_j = cfg_.propulsion.hover_power() * plan.duration_s;
    return plan;
}

std::array<bool, 5> World::legal_actions(int agent_id, const std::optional<HoverPlan>& hover) const {
    const UavAgent& a = agents_[static_cast<size_t>(agent_id)];
    std::array<bool, 5> mask{};
    const double eps = cfg_.safety_margin_j;
    const int h = cfg_.grid.cells_per_side;
    const int col = cfg_.grid.cell_col(a.cell);
    const int row = cfg_.grid.cell_row(a.cell);

    if (cell_demand_[static_cast<size_t>(a.cell)] > 0.0 && hover.has_value()) {
        mask[kHover] =
            a.energy_j - hover->energy_j >= flight_energy_to_home(a.cell, a.velocity) + eps;
    }

    const double move_cost =
        physics::propulsion_power(cfg_.propulsion, a.velocity) * move_duration(agent_id);
    const int blocked = reverse_of(a.last_action); // -1 unless the last action was a move
    for (int act = kForward; act <= kLeft; ++act) {
        int tc = col, tr = row;
        switch (act) {
            case kForward: ++tr; break;
            case kRight: ++tc; break;
            case kBackward: --tr; break;
            case kLeft: --tc; break;
        }
        if (tc < 0 || tc >= h || tr < 0 || tr >= h) continue;
        if (act == blocked) continue;
        const int target = cfg_.grid.cell_index(tc, tr);
        if (a.energy_j - move_cost >= flight_energy_to_home(target, a.velocity) + eps)
            mask[static_cast<size_t>(act)] = true;
    }
    return mask;
}

void World::exchange_messages() {
    if (cfg_.comm_range_m <= 0.0) return; // no inter-UAV communication at all
    const int n = cfg_.num_uavs;
    for (int i = 0; i < n; ++i) {
        UavAgent& ai = agents_[static_cast<size_t>(i)];
        if (ai.terminated) continue;
        for (int j = i + 1; j < n; ++j) {
            UavAgent& aj = agents_[static_cast<size_t>(j)];
            if (aj.terminated) continue;
            const double dx = cfg_.grid.center_x(ai.cell) - cfg_.grid.center_x(aj.cell);
            const double dy = cfg_.grid.center_y(ai.cell) - cfg_.grid.center_y(aj.cell);
            if (std::hypot(dx, dy) > cfg_.comm_range_m) continue;
            BitGrid merged = ai.map;
            merged.or_with(aj.map);
            ai.map = merged;
            aj.map = merged;
            ai.known_peer_cell[static_cast<size_t>(j)] = aj.cell;
            aj.known_peer_cell[static_cast<size_t>(i)] = ai.cell;
        }
    }
}

bool World::must_return_home(int agent_id, const std::array<bool, 5>& mask) const {
    const UavAgent& a = agents_[static_cast<size_t>(agent_id)];
    if (a.map.all_set()) return true;
    for (bool m : mask)
        if (m) return false;
    return true;
}

void World::observe_and_mark(int agent_id) {
    UavAgent& a = agents_[static_cast<size_t>(agent_id)];
    const int h = cfg_.grid.cells_per_side;
    const int col = cfg_.grid.cell_col(a.cell);
    const int row = cfg_.grid.cell_row(a.cell);
    const int r = cfg_.window_radius();
    for (int dr = -r; dr <= r; ++dr) {
        for (int dc = -r; dc <= r; ++dc) {
            const int cc = col + dc, rr = row + dr;
            if (cc < 0 || cc >= h || rr < 0 || rr >= h) continue;
            const int cell = cfg_.grid.cell_index(cc, rr);
            if (cell_demand_[static_cast<size_t>(cell)] == 0.0) a.map.set(cell);
        }
    }
}

CompactObs World::make_observation(int agent_id) const {
    const UavAgent& a = agents_[static_cast<size_t>(agent_id)];
    CompactObs obs;
    obs.energy_frac = static_cast<float>(a.energy_j / a.e_max_j);
    obs.cell = static_cast<uint16_t>(a.cell);
    obs.last_action = static_cast<int8_t>(a.last_action);

    const int h = cfg_.grid.cells_per_side;
    const int col = cfg_.grid.cell_col(a.cell);
    const int row = cfg_.grid.cell_row(a.cell);
    int k = 0;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc, ++k) {
            const int cc = col + dc, rr = row + dr;
            if (cc < 0 || cc >= h || rr < 0 || rr >= h) continue;
            obs.window_demand[static_cast<size_t>(k)] = static_cast<float>(
                cell_demand_[static_cast<size_t>(cfg_.grid.cell_index(cc, rr))] /
                cfg_.reward_data_unit_bits);
        }
    }
    const int n_cells = cfg_.grid.cell_count();
    obs.map_words.assign(static_cast<size_t>((n_cells + 63) / 64), 0);
    for (int c = 0; c < n_cells; ++c)
        if (a.map.get(c)) obs.map_words[static_cast<size_t>(c >> 6)] |= 1ULL << (c & 63);
    return obs;
}

CompactState World::snapshot_state() const {
    CompactState st;
    const int n_cells = cfg_.grid.cell_count();
    const size_t words = static_cast<size_t>((n_cells + 63) / 64);
    st.map_words.assign(words * static_cast<size_t>(cfg_.num_uavs + 1), 0);
    for (int n = 0; n < cfg_.num_uavs; ++n) {
        const UavAgent& a = agents_[static_cast<size_t>(n)];
        st.cells.push_back(static_cast<uint16_t>(a.cell));
        st.energy_frac.push_back(static_cast<float>(a.energy_j / a.e_max_j));
        for (int c = 0; c < n_cells; ++c)
            if (a.map.get(c))
                st.map_words[static_cast<size_t>(n) * words + static_cast<size_t>(c >> 6)] |=
                    1ULL << (c & 63);
    }
    for (int c = 0; c < n_cells; ++c)
        if (cell_demand_[static_cast<size_t>(c)] == 0.0)
            st.map_words[static_cast<size_t>(cfg_.num_uavs) * words + static_cast<size_t>(c >> 6)] |=
                1ULL << (c & 63);
    return st;
}

void World::start_fly_home(UavAgent& a) {
    a.pending = kReturnHome;
    a.pending_duration = flight_time_to_home(a.cell, a.velocity);
    a.pending_energy_j = flight_energy_to_home(a.cell, a.velocity);
    a.pending_rate_sum = 0.0;
    a.pending_target_cell = kHomeCell;
    a.finish_time = clock_ + a.pending_duration;
}

void World::claim_cell(UavAgent& a) {
    const size_t cell = static_cast<size_t>(a.cell);
    collected_bits_ += cell_demand_[cell];
    cell_demand_[cell] = 0.0;
    for (int sn_id : cell_sns_[cell]) scenario_.nodes[static_cast<size_t>(sn_id)].demand_bits = 0.0;
}

bool World::decide_and_schedule(UavAgent& a, Policy& policy, EpisodeRecord& rec, int step_index) {
    std::optional<HoverPlan> plan;
    if (cell_demand_[static_cast<size_t>(a.cell)] > 0.0) plan = plan_hover(a.id);
    const std::array<bool, 5> mask = legal_actions(a.id, plan);

    if (must_return_home(a.id, mask)) {
        start_fly_home(a);
        return false;
    }

    const CompactObs obs = make_observation(a.id);
    DecisionContext ctx{a.id, a.cell, clock_, mask, &obs};
    const int action = policy.decide(ctx);
    if (action == kReturnHome) {
        start_fly_home(a);
        return false;
    }
    if (action < 0 || action > kLeft || !mask[static_cast<size_t>(action)])
        throw std::logic_error("policy returned an illegal action");

    if (action == kHover) {
        claim_cell(a);
        a.pending = kHover;
        a.pending_duration = plan->duration_s;
        a.pending_energy_j = plan->energy_j;
        a.pending_rate_sum = plan->rate_sum;
        a.pending_target_cell = a.cell;
    } else {
        const int col = cfg_.grid.cell_col(a.cell);
        const int row = cfg_.grid.cell_row(a.cell);
        int tc = col, tr = row;
        switch (action) {
            case kForward: ++tr; break;
            case kRight: ++tc; break;
            case kBackward: --tr; break;
            case kLeft: --tc; break;
        }
        a.pending = action;
        a.pending_duration = move_duration(a.id);
        a.pending_energy_j =
            physics::propulsion_power(cfg_.propulsion, a.velocity) * a.pending_duration;
        a.pending_rate_sum = 0.0;
        a.pending_target_cell = cfg_.grid.cell_index(tc, tr);
    }
    a.finish_time = clock_ + a.pending_duration;

    DecisionPoint dp;
    dp.step = step_index;
    dp.obs = obs;
    dp.action = static_cast<uint8_t>(action);
    for (int i = 0; i < 5; ++i)
        if (mask[static_cast<size_t>(i)]) dp.legal_mask |= static_cast<uint8_t>(1u << i);
    if (const auto* u = policy.last_utilities()) dp.utilities = *u;
    rec.decisions[static_cast<size_t>(a.id)].push_back(dp);
    return true;
}

double World::phi_sum() const {
    double sum = 0.0;
    for (const UavAgent& a : agents_) {
        if (a.pending == kHover)
            sum += a.pending_rate_sum / cfg_.reward_data_unit_bits;
        else if (a.pending >= kForward && a.pending <= kReturnHome)
            sum += kMovePenalty;
    }
    return sum;
}

World::Staged World::stage(bool record_states) const {
    Staged s;
    if (record_states) s.state = snapshot_state();
    s.inflight.resize(static_cast<size_t>(cfg_.num_uavs));
    for (int n = 0; n < cfg_.num_uavs; ++n)
        s.inflight[static_cast<size_t>(n)] = static_cast<uint8_t>(agents_[static_cast<size_t>(n)].pending);
    return s;
}

void World::finalize_metrics(EpisodeRecord& rec) const {
    EpisodeMetrics& m = rec.metrics;
    m.total_reward = total_reward_;
    m.initial_demand_bits = initial_demand_;
    m.collected_bits = collected_bits_;
    m.collected_pct = initial_demand_ > 0.0 ? 100.0 * collected_bits_ / initial_demand_ : 0.0;
    m.energy_used_j.clear();
    double total_energy = 0.0;
    for (const UavAgent& a : agents_) {
        m.energy_used_j.push_back(a.e_max_j - a.energy_j);
        total_energy += a.e_max_j - a.energy_j;
    }
    m.completion_time_s = clock_;
    m.energy_efficiency = total_energy > 0.0 ? collected_bits_ / total_energy : 0.0;
    m.event_count = static_cast<int>(rec.steps.size());
}

EpisodeRecord World::run_episode(const Scenario& scenario, Policy& policy, uint64_t channel_seed,
                                 bool record_states) {
    reset(scenario, channel_seed);
    policy.begin_episode();

    EpisodeRecord rec;
    rec.num_agents = cfg_.num_uavs;
    rec.grid_h = cfg_.grid.cells_per_side;
    rec.decisions.resize(static_cast<size_t>(cfg_.num_uavs));

    // Initial instant: every UAV observes and commits its first action, in id
    // order, so a hover claim is visible to later deciders at the same time.
    for (auto& a : agents_) observe_and_mark(a.id);
    exchange_messages();
    for (auto& a : agents_) decide_and_schedule(a, policy, rec, 0);
    Staged staged = stage(record_states);

    const double alpha = *std::max_element(cfg_.e_max_j.begin(), cfg_.e_max_j.end());

    while (true) {
        // Next completion: minimal finish time, ties broken by agent id.
        int next = -1;
        for (const auto& a : agents_) {
            if (a.pending == kDone) continue;
            if (next < 0 || a.finish_time < agents_[static_cast<size_t>(next)].finish_time) next = a.id;
        }
        if (next < 0) break;

        UavAgent& a = agents_[static_cast<size_t>(next)];
        const double tau = a.finish_time - clock_;
        double reward = semi_markov_reward(cfg_.gamma, tau, phi_sum());
        clock_ = a.finish_time;

        a.energy_j -= a.pending_energy_j;
        const int completed = a.pending;
        a.cell = a.pending_target_cell;
        a.pending = kDone;
        if (completed == kReturnHome) {
            a.terminated = true;
        } else {
            a.last_action = completed;
            observe_and_mark(a.id);
            exchange_messages();
            decide_and_schedule(a, policy, rec, static_cast<int>(rec.steps.size()) + 1);
        }

        bool terminal = true;
        for (const auto& other : agents_)
            if (!other.terminated) terminal = false;
        if (terminal) {
            double total_energy = 0.0;
            for (const auto& other : agents_) total_energy += other.e_max_j - other.energy_j;
            const double gamma_eff = total_energy > 0.0
                                         ? (collected_bits_ / cfg_.reward_data_unit_bits) / total_energy
                                         : 0.0;
            reward += std::pow(cfg_.gamma, tau) * alpha * gamma_eff;
        }

        StepRecord step;
        step.duration = tau;
        step.reward = reward;
        step.terminal = terminal;
        step.inflight = std::move(staged.inflight);
        step.state = std::move(staged.state);
        rec.steps.push_back(std::move(step));
        total_reward_ += reward;

        if (terminal) break;
        staged = stage(record_states);
    }
    finalize_metrics(rec);
    return rec;
}

EpisodeRecord World::run_episode_sync(const Scenario& scenario, Policy& policy,
                                      uint64_t channel_seed, bool record_states) {
    reset(scenario, channel_seed);
    policy.begin_episode();

    EpisodeRecord rec;
    rec.num_agents = cfg_.num_uavs;
    rec.grid_h = cfg_.grid.cells_per_side;
    rec.decisions.resize(static_cast<size_t>(cfg_.num_uavs));

    for (auto& a : agents_) observe_and_mark(a.id);
    exchange_messages();
    for (auto& a : agents_) decide_and_schedule(a, policy, rec, 0);
    Staged staged = stage(record_states);

    const double alpha = *std::max_element(cfg_.e_max_j.begin(), cfg_.e_max_j.end());
    const double hover_power = cfg_.propulsion.hover_power();

    while (true) {
        double round = -1.0;
        for (const auto& a : agents_)
            if (a.pending != kDone) round = std::max(round, a.pending_duration);
        if (round < 0.0) break;

        double reward = semi_markov_reward(cfg_.gamma, round, phi_sum());
        clock_ += round;

        // Complete the round in id order; early finishers hover in place
        // until the slowest action of the round is done.
        for (auto& a : agents_) {
            if (a.pending == kDone) continue;
            const double wait = round - a.pending_duration;
            a.energy_j -= a.pending_energy_j + hover_power * wait;
            const int completed = a.pending;
            a.cell = a.pending_target_cell;
            a.pending = kDone;
            if (completed == kReturnHome)
                a.terminated = true;
            else
                a.last_action = completed;
        }

        bool terminal = true;
        for (const auto& a : agents_)
            if (!a.terminated) terminal = false;
        if (terminal) {
            double total_energy = 0.0;
            for (const auto& a : agents_) total_energy += a.e_max_j - a.energy_j;
            const double gamma_eff = total_energy > 0.0
                                         ? (collected_bits_ / cfg_.reward_data_unit_bits) / total_energy
                                         : 0.0;
            reward += std::pow(cfg_.gamma, round) * alpha * gamma_eff;
        }

        StepRecord step;
        step.duration = round;
        step.reward = reward;
        step.terminal = terminal;
        step.inflight = std::move(staged.inflight);
        step.state = std::move(staged.state);
        rec.steps.push_back(std::move(step));
        total_reward_ += reward;
        if (terminal) break;

        for (auto& a : agents_)
            if (!a.terminated) observe_and_mark(a.id);
        exchange_messages();
        for (auto& a : agents_)
            if (!a.terminated)
                decide_and_schedule(a, policy, rec, static_cast<int>(rec.steps.size()));
        staged = stage(record_states);
    }
    finalize_metrics(rec);
    return rec;
}

} // namespace uavsim::world
