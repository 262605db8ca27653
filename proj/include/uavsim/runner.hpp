#pragma once

#include <string>
#include <vector>

#include "uavsim/config.hpp"
#include "uavsim/metrics.hpp"

namespace uavsim::harness {

struct TrainOutput {
    std::string log_path;
    std::string final_checkpoint;
    std::vector<std::string> checkpoints;
    int episodes_run = 0;
};

// Full training run: per-episode JSONL log, a checkpoint every
// `checkpoint_every` episodes, the resolved config and the override report
// written next to them.  `quiet` suppresses progress on stderr.
TrainOutput train_run(const ExperimentConfig& cfg, const std::string& out_dir, bool quiet = true);

struct EvalAggregate {
    int scenarios = 0;
    double mean_reward = 0.0;
    double mean_collected_pct = 0.0;
    double min_collected_pct = 0.0;
    double mean_completion_s = 0.0;
    double mean_efficiency = 0.0;
    double mean_energy_j = 0.0;
};

// Evaluates a policy greedily on a reproducible scenario bench.  `checkpoint`
// is ignored for the scripted baseline.  When `out_path` is non-empty a
// per-scenario JSONL plus a JSON aggregate (with config echo) are written.
EvalAggregate evaluate_run(const ExperimentConfig& cfg, const std::string& checkpoint,
                           uint64_t bench_seed, int n_scenarios, const std::string& out_path,
                           std::vector<EpisodeMetrics>* per_scenario = nullptr);

// Picks the stored checkpoint with the highest mean energy efficiency on the
// validation bench; earlier checkpoint wins ties.
std::string best_policy_selection(const ExperimentConfig& cfg, const std::string& run_dir);

// Training log JSONL -> CSV learning-curve series.
void emit_training_csv(const std::string& log_path, const std::string& out_csv);

// Evaluation aggregate JSONs -> one CSV sorted by the swept config key.
void emit_sweep_csv(const std::vector<std::string>& aggregate_paths, const std::string& x_key,
                    const std::string& out_csv);

} // namespace uavsim::harness
