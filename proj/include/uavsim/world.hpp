#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "uavsim/bandwidth.hpp"
#include "uavsim/metrics.hpp"
#include "uavsim/physics.hpp"
#include "uavsim/scenario.hpp"
#include "uavsim/util.hpp"

namespace uavsim::world {

// Discrete action space.  Movement directions follow the grid axes: forward
// is +row, right is +col.
enum Action : int {
    kHover = 0,
    kForward = 1,
    kRight = 2,
    kBackward = 3,
    kLeft = 4,
    // Policy-initiated early return; also the in-flight code of the final leg.
    kReturnHome = 5,
    // In-flight code of a UAV that has already landed.
    kDone = 6,
};

inline int reverse_of(int action) {
    switch (action) {
        case kForward: return kBackward;
        case kBackward: return kForward;
        case kRight: return kLeft;
        case kLeft: return kRight;
        default: return -1;
    }
}

enum class AllocationScheme { kEqual, kOptimal };

struct WorldConfig {
    GridSpec grid;
    int num_uavs = 2;
    std::vector<double> velocities = {5.0, 10.0}; // m/s, per UAV
    std::vector<double> e_max_j = {1e6, 1e6};     // battery capacity, J
    double comm_range_m = 200.0;
    double safety_margin_j = 1e3;                 // epsilon
    double gamma = 0.99;                          // continuous-time discount, per second
    double reward_data_unit_bits = 1e6;           // data terms scaled by the max data size
    double bandwidth_hz = 1e6;                    // per-UAV band B
    AllocationScheme allocation = AllocationScheme::kEqual;
    physics::PropulsionParams propulsion;
    physics::ChannelParams channel;

    void validate() const;
    int window_radius() const { return 1; } // 3x3 observable region
};

// Observation content in compact form; the one-hot blocks are expanded when
// the vector is materialized for the networks.
struct CompactObs {
    float energy_frac = 0.0f;
    uint16_t cell = 0;
    std::vector<uint64_t> map_words;  // own completion map
    std::array<float, 9> window_demand{}; // row-major (drow=-1..1, dcol=-1..1), data units
    int8_t last_action = -1;          // -1 before the first decision
};

// Global state snapshot: per-UAV scalars plus (N+1) completion maps (per-agent
// maps then the true map), all bit-packed.
struct CompactState {
    std::vector<uint16_t> cells;
    std::vector<float> energy_frac;
    std::vector<uint64_t> map_words;
};

struct DecisionPoint {
    int step = 0;           // global transition index at which the decision was made
    CompactObs obs;
    uint8_t action = 0;     // 0..4
    uint8_t legal_mask = 0; // bit a set iff action a was legal
    std::array<float, 5> utilities{}; // behaviour-time Q-values (zeros for scripted policies)
};

struct StepRecord {
    double duration = 0.0;
    double reward = 0.0;
    bool terminal = false;
    std::vector<uint8_t> inflight; // per UAV: 0..4, kReturnHome, kDone
    CompactState state;
};

struct EpisodeRecord {
    int num_agents = 0;
    int grid_h = 0;
    std::vector<std::vector<DecisionPoint>> decisions; // per agent, in time order
    std::vector<StepRecord> steps;
    EpisodeMetrics metrics;

    size_t transition_count() const { return steps.size(); }
};

struct DecisionContext {
    int agent = 0;
    int cell = 0;
    double clock = 0.0;
    std::array<bool, 5> mask{};
    const CompactObs* obs = nullptr;
};

// Rollout policy; may return kReturnHome to end its mission early (used by
// scripted baselines).
class Policy {
  public:
    virtual ~Policy() = default;
    virtual void begin_episode() {}
    virtual int decide(const DecisionContext& ctx) = 0;
    // Utilities backing the last decide() call, when the policy has them.
    virtual const std::array<float, 5>* last_utilities() const { return nullptr; }
};

// Estimated channel gain for one SN seen from the hovering UAV.  Injectable so
// tests can pin rates; the default samples the physics channel model.
using ChannelGainFn = std::function<double(const SensorNode& sn, double horizontal_dist,
                                           std::mt19937_64& rng)>;

struct HoverPlan {
    double duration_s = 0.0;
    double rate_sum = 0.0;  // sum of allocated per-SN rates, bit/s
    double energy_j = 0.0;
};

struct UavAgent {
    int id = 0;
    int cell = 0;
    double energy_j = 0.0;
    double e_max_j = 0.0;
    double velocity = 0.0;
    BitGrid map;
    int last_action = -1;
    bool terminated = false;
    std::vector<int> known_peer_cell; // last exchanged positions, -1 unknown

    // In-flight action state.
    int pending = kDone;
    double finish_time = 0.0;
    double pending_duration = 0.0;
    double pending_energy_j = 0.0;
    double pending_rate_sum = 0.0; // bit/s while hovering
    int pending_target_cell = -1;
};

// The asynchronous decision environment.  One instance runs one episode at a
// time; instances share nothing mutable and can run in parallel.
class World {
  public:
    explicit World(WorldConfig cfg);

    void set_channel_fn(ChannelGainFn fn) { channel_fn_ = std::move(fn); }

    // Runs a full episode.  Deterministic given (scenario, channel_seed,
    // policy behaviour).  record_states=false skips state snapshots for
    // evaluation-only runs.
    EpisodeRecord run_episode(const Scenario& scenario, Policy& policy, uint64_t channel_seed,
                              bool record_states = true);

    // Lock-step variant: all non-terminated UAVs decide together and early
    // finishers hover in place (at hover power) until the slowest action of
    // the round completes.
    EpisodeRecord run_episode_sync(const Scenario& scenario, Policy& policy,
                                   uint64_t channel_seed, bool record_states = true);

    // --- single-op surface (also used by tests) -----------------------------
    const WorldConfig& config() const { return cfg_; }
    const std::vector<UavAgent>& agents() const { return agents_; }
    UavAgent& agent(int id) { return agents_[static_cast<size_t>(id)]; }
    double cell_demand(int cell) const { return cell_demand_[static_cast<size_t>(cell)]; }
    double clock() const { return clock_; }
    double collected_bits() const { return collected_bits_; }
    bool true_map_bit(int cell) const { return cell_demand_[static_cast<size_t>(cell)] == 0.0; }

    void reset(const Scenario& scenario, uint64_t channel_seed);

    // Straight-line energy to reach the final destination from a cell.
    double flight_energy_to_home(int cell, double velocity) const;
    double flight_time_to_home(int cell, double velocity) const;
    double move_duration(int agent_id) const;

    // Samples channels for the active SNs of the agent's cell and allocates
    // bandwidth; call only when the cell has remaining demand.
    HoverPlan plan_hover(int agent_id);

    // Legal-action mask per the movement, boundary, energy-safety and
    // empty-cell rules.  `hover` carries the already planned hover when the
    // current cell has demand.
    std::array<bool, 5> legal_actions(int agent_id, const std::optional<HoverPlan>& hover) const;

    // Pairwise position sharing and completion-map union within comm range.
    void exchange_messages();

    // True when the agent must fly home: completion map all ones, or no legal
    // action remains.
    bool must_return_home(int agent_id, const std::array<bool, 5>& mask) const;

    CompactObs make_observation(int agent_id) const;
    CompactState snapshot_state() const;

  private:
    struct Staged {
        CompactState state;
        std::vector<uint8_t> inflight;
    };

    void observe_and_mark(int agent_id);
    void start_fly_home(UavAgent& a);
    void claim_cell(UavAgent& a);
    bool decide_and_schedule(UavAgent& a, Policy& policy, EpisodeRecord& rec, int step_index);
    double phi_sum() const;
    Staged stage(bool record_states) const;
    void finalize_metrics(EpisodeRecord& rec) const;

    WorldConfig cfg_;
    ChannelGainFn channel_fn_;
    std::mt19937_64 chan_rng_;

    Scenario scenario_;
    std::vector<double> cell_demand_;
    std::vector<std::vector<int>> cell_sns_;
    std::vector<UavAgent> agents_;
    double clock_ = 0.0;
    double collected_bits_ = 0.0;
    double initial_demand_ = 0.0;
    double total_reward_ = 0.0;
    double discount_to_clock_ = 1.0; // gamma^clock, for the logged total return
};

// Closed-form discount integral over one action interval:
// (gamma^tau - 1) / ln gamma, the weight applied to the constant instantaneous
// reward; tends to 0 as tau -> 0.
double discount_chord(double gamma, double tau);

// Reward of one transition without the terminal term.
double semi_markov_reward(double gamma, double tau, double phi_sum);

} // namespace uavsim::world
