#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "uavsim/learner.hpp"
#include "uavsim/world.hpp"

namespace uavsim::harness {

enum class Algorithm { kAqmix, kAiql, kSyncQmix, kHert };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm a);

// Full experiment description.  Defaults follow the reference desk setup; a
// loaded file may override any key and every override is reported.
struct ExperimentConfig {
    // grid / scenario
    int grid_h = 8;
    double cell_size_m = 50.0;
    double altitude_m = 100.0;
    double dense_ratio = 0.3;
    double lambda_dense = 10.0;
    double lambda_sparse = 1.0;
    double data_density = 0.3; // phi
    double data_min_mbit = 0.1;
    double data_max_mbit = 1.0;

    // fleet
    int num_uavs = 2;
    std::vector<double> velocity_mps = {5.0, 10.0};
    std::vector<double> e_max_kj = {1000.0, 1000.0};
    double comm_range_m = 200.0;
    double safety_margin_kj = 1.0;

    // channel / propulsion
    double tx_power_dbm = 10.0;
    double noise_psd_dbm = -150.0; // per Hz
    double pathloss_exponent = 2.6;
    double nlos_attenuation = 0.2;
    double los_a = 11.95;
    double los_b = 0.14;
    double rician_a1 = 1.0;
    double rician_a2 = 4.39;
    double carrier_ghz = 2.0;
    int num_antennas = 4;
    double sigma_e2 = 0.0;
    double bandwidth_mhz = 1.0;
    double p0_w = 79.8563;
    double p1_w = 88.6279;
    double p2_kg_per_m = 0.00924263;
    double u_tip_mps = 120.0;
    double v0_mps = 4.03;

    // learning
    std::string algorithm = "aqmix";  // aqmix | aiql | sync_qmix | hert
    std::string allocation = "equal"; // equal | optimal
    double gamma = 0.99;
    double learning_rate = 5e-5;
    int batch_episodes = 32;
    int64_t buffer_transitions = 1'000'000;
    int hidden = 256;
    int mix_hidden = 256;
    int kernel_m = 3;
    double grad_clip_norm = 10.0;
    double eps_start = 1.0;
    double eps_final = 0.05;
    double eps_anneal_frac = 0.2; // fraction of the episode budget
    int episodes = 30000;
    int checkpoint_every = 100;
    bool early_stop = true;
    int early_stop_window = 1000;
    int early_stop_patience = 2;
    double early_stop_min_improvement = 1.0;

    // runtime / evaluation
    uint64_t seed = 1;
    int threads = 2;
    uint64_t bench_seed = 1234;
    int bench_scenarios = 1000;
    int validation_scenarios = 30;

    void validate() const;
    GridSpec grid_spec() const;
    world::WorldConfig world_config() const;
    aqmix::LearnerConfig learner_config() const;
    Algorithm algo() const { return parse_algorithm(algorithm); }
    double epsilon_at(int episode) const;
};

// Canonical text form: fixed key order, shortest round-trip floats.
std::string serialize_config(const ExperimentConfig& cfg);

struct LoadedConfig {
    ExperimentConfig config;
    std::map<std::string, std::string> overrides; // keys present and != default
};

LoadedConfig parse_config(const std::string& text);
LoadedConfig load_config_file(const std::string& path);

} // namespace uavsim::harness
