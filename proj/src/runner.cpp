#include "uavsim/runner.hpp"

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <json.hpp>

#include "uavsim/baselines.hpp"
#include "uavsim/util.hpp"

namespace fs = std::filesystem;

namespace uavsim::harness {

namespace {

// Seed-stream ids; never reorder, run reproducibility depends on them.
enum Stream : uint64_t {
    kScenarioStream = 1,
    kChannelStream = 2,
    kPolicyStream = 3,
    kSampleStream = 4,
    kBenchScenario = 10,
    kBenchChannel = 11,
    kValidScenario = 12,
    kValidChannel = 13,
};

std::string metrics_json(int episode, const EpisodeMetrics& m, double epsilon, double loss_avg) {
    std::string s = "{\"episode\":" + std::to_string(episode);
    s += ",\"reward\":" + format_double(m.total_reward);
    s += ",\"collected_bits\":" + format_double(m.collected_bits);
    s += ",\"collected_pct\":" + format_double(m.collected_pct);
    s += ",\"completion_time_s\":" + format_double(m.completion_time_s);
    s += ",\"energy_j\":" + format_double(m.total_energy_j());
    s += ",\"energy_efficiency\":" + format_double(m.energy_efficiency);
    s += ",\"epsilon\":" + format_double(epsilon);
    s += ",\"loss_avg\":" + format_double(loss_avg);
    s += ",\"events\":" + std::to_string(m.event_count);
    s += "}";
    return s;
}

} // namespace

TrainOutput train_run(const ExperimentConfig& cfg, const std::string& out_dir, bool quiet) {
    cfg.validate();
    const Algorithm algo = cfg.algo();
    if (algo == Algorithm::kHert) throw ConfigError("train: hert is a scripted policy, nothing to train");

    fs::create_directories(out_dir);
    {
        std::ofstream rc(fs::path(out_dir) / "config.resolved");
        rc << serialize_config(cfg);
    }

    world::World env(cfg.world_config());
    aqmix::Learner learner(cfg.learner_config());
    aqmix::ReplayBuffer buffer(static_cast<size_t>(cfg.buffer_transitions));
    std::mt19937_64 sample_rng(derive_seed(cfg.seed, kSampleStream));
    const GridSpec grid = cfg.grid_spec();
    const bool sync_rounds = algo == Algorithm::kSyncQmix;

    TrainOutput out;
    out.log_path = (fs::path(out_dir) / "training_log.jsonl").string();
    std::ofstream log(out.log_path, std::ios::trunc);
    if (!log) throw std::runtime_error("train: cannot write " + out.log_path);

    std::deque<float> recent_losses;
    std::vector<double> rewards;
    int plateau_strikes = 0;
    const int anneal_end = static_cast<int>(cfg.eps_anneal_frac * cfg.episodes);

    for (int ep = 0; ep < cfg.episodes; ++ep) {
        const double eps = cfg.epsilon_at(ep);
        aqmix::EpsGreedyPolicy policy(learner.agent_net(), cfg.num_uavs, cfg.grid_h, eps,
                                      derive_seed(cfg.seed, kPolicyStream, static_cast<uint64_t>(ep)));
        std::mt19937_64 scen_rng = make_rng(cfg.seed, kScenarioStream, static_cast<uint64_t>(ep));
        const Scenario scenario = generate_scenario(grid, scen_rng);
        const uint64_t chan_seed = derive_seed(cfg.seed, kChannelStream, static_cast<uint64_t>(ep));

        world::EpisodeRecord rec = sync_rounds ? env.run_episode_sync(scenario, policy, chan_seed)
                                               : env.run_episode(scenario, policy, chan_seed);
        const EpisodeMetrics m = rec.metrics;
        rewards.push_back(m.total_reward);
        buffer.add(std::move(rec));

        double loss_avg = 0.0;
        if (buffer.size() >= static_cast<size_t>(cfg.batch_episodes)) {
            const float loss = learner.train_step(buffer, sample_rng);
            recent_losses.push_back(loss);
            if (recent_losses.size() > 100) recent_losses.pop_front();
        }
        for (float l : recent_losses) loss_avg += l;
        if (!recent_losses.empty()) loss_avg /= static_cast<double>(recent_losses.size());

        log << metrics_json(ep, m, eps, loss_avg) << "\n";

        if ((ep + 1) % cfg.checkpoint_every == 0) {
            char name[64];
            std::snprintf(name, sizeof(name), "ckpt_ep%06d.bin", ep + 1);
            const std::string path = (fs::path(out_dir) / name).string();
            learner.save(path, static_cast<uint64_t>(ep + 1));
            out.checkpoints.push_back(path);
        }
        if (!quiet && (ep + 1) % 50 == 0)
            std::cerr << "ep " << ep + 1 << " reward " << m.total_reward << " collected "
                      << m.collected_pct << "% events " << m.event_count << " loss " << loss_avg
                      << "\n";

        out.episodes_run = ep + 1;
        if (cfg.early_stop && ep + 1 >= anneal_end + 2 * cfg.early_stop_window &&
            (ep + 1) % cfg.early_stop_window == 0) {
            const size_t w = static_cast<size_t>(cfg.early_stop_window);
            double last = 0.0, prev = 0.0;
            for (size_t i = rewards.size() - w; i < rewards.size(); ++i) last += rewards[i];
            for (size_t i = rewards.size() - 2 * w; i < rewards.size() - w; ++i) prev += rewards[i];
            last /= static_cast<double>(w);
            prev /= static_cast<double>(w);
            if (last - prev < cfg.early_stop_min_improvement) {
                if (++plateau_strikes >= cfg.early_stop_patience) {
                    if (!quiet) std::cerr << "early stop at episode " << ep + 1 << "\n";
                    break;
                }
            } else {
                plateau_strikes = 0;
            }
        }
    }

    out.final_checkpoint = (fs::path(out_dir) / "ckpt_final.bin").string();
    learner.save(out.final_checkpoint, static_cast<uint64_t>(out.episodes_run));
    return out;
}

EvalAggregate evaluate_run(const ExperimentConfig& cfg, const std::string& checkpoint,
                           uint64_t bench_seed, int n_scenarios, const std::string& out_path,
                           std::vector<EpisodeMetrics>* per_scenario) {
    cfg.validate();
    const Algorithm algo = cfg.algo();
    const GridSpec grid = cfg.grid_spec();

    aqmix::Learner learner(cfg.learner_config());
    if (algo != Algorithm::kHert) {
        if (checkpoint.empty()) throw ConfigError("evaluate: a checkpoint is required for " + cfg.algorithm);
        learner.load(checkpoint);
    }
    baselines::SectorAssignment sectors =
        baselines::SectorAssignment::vertical_strips(cfg.grid_h, cfg.num_uavs);

    std::vector<EpisodeMetrics> results(static_cast<size_t>(n_scenarios));
    const int n_threads = std::max(1, std::min(cfg.threads, n_scenarios));

    auto worker = [&](int t) {
        world::World env(cfg.world_config());
        std::unique_ptr<world::Policy> policy;
        if (algo == Algorithm::kHert)
            policy = std::make_unique<baselines::HertPolicy>(sectors, cfg.grid_h);
        else
            policy = std::make_unique<aqmix::EpsGreedyPolicy>(learner.agent_net(), cfg.num_uavs,
                                                              cfg.grid_h, 0.0, 0);
        for (int i = t; i < n_scenarios; i += n_threads) {
            std::mt19937_64 scen_rng = make_rng(bench_seed, kBenchScenario, static_cast<uint64_t>(i));
            const Scenario sc = generate_scenario(grid, scen_rng);
            const uint64_t chan_seed = derive_seed(bench_seed, kBenchChannel, static_cast<uint64_t>(i));
            world::EpisodeRecord rec = env.run_episode(sc, *policy, chan_seed, false);
            results[static_cast<size_t>(i)] = rec.metrics;
        }
    };
    if (n_threads > 1) {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    } else {
        worker(0);
    }

    EvalAggregate agg;
    agg.scenarios = n_scenarios;
    agg.min_collected_pct = n_scenarios > 0 ? 1e18 : 0.0;
    for (const auto& m : results) {
        agg.mean_reward += m.total_reward;
        agg.mean_collected_pct += m.collected_pct;
        agg.min_collected_pct = std::min(agg.min_collected_pct, m.collected_pct);
        agg.mean_completion_s += m.completion_time_s;
        agg.mean_efficiency += m.energy_efficiency;
        agg.mean_energy_j += m.total_energy_j();
    }
    if (n_scenarios > 0) {
        agg.mean_reward /= n_scenarios;
        agg.mean_collected_pct /= n_scenarios;
        agg.mean_completion_s /= n_scenarios;
        agg.mean_efficiency /= n_scenarios;
        agg.mean_energy_j /= n_scenarios;
    }
    if (per_scenario) *per_scenario = results;

    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw std::runtime_error("evaluate: cannot write " + out_path);
        for (int i = 0; i < n_scenarios; ++i)
            out << metrics_json(i, results[static_cast<size_t>(i)], 0.0, 0.0) << "\n";

        nlohmann::json j;
        j["algorithm"] = cfg.algorithm;
        j["allocation"] = cfg.allocation;
        j["scenarios"] = agg.scenarios;
        j["bench_seed"] = bench_seed;
        j["mean_reward"] = agg.mean_reward;
        j["mean_collected_pct"] = agg.mean_collected_pct;
        j["min_collected_pct"] = agg.min_collected_pct;
        j["mean_completion_s"] = agg.mean_completion_s;
        j["mean_efficiency"] = agg.mean_efficiency;
        j["mean_energy_j"] = agg.mean_energy_j;
        j["e_max_kj"] = cfg.e_max_kj.front();
        j["data_density"] = cfg.data_density;
        j["num_uavs"] = cfg.num_uavs;
        j["comm_range_m"] = cfg.comm_range_m;
        j["sigma_e2"] = cfg.sigma_e2;
        std::ofstream ja(out_path + ".aggregate.json", std::ios::trunc);
        ja << j.dump(2) << "\n";
    }
    return agg;
}

std::string best_policy_selection(const ExperimentConfig& cfg, const std::string& run_dir) {
    std::vector<std::string> ckpts;
    for (const auto& entry : fs::directory_iterator(run_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("ckpt_ep", 0) == 0 && name.size() > 4 &&
            name.substr(name.size() - 4) == ".bin")
            ckpts.push_back(entry.path().string());
    }
    if (ckpts.empty()) throw std::runtime_error("best_policy_selection: no checkpoints in " + run_dir);
    std::sort(ckpts.begin(), ckpts.end());

    std::string best;
    double best_eff = -1.0;
    for (const auto& path : ckpts) {
        ExperimentConfig eval_cfg = cfg;
        const EvalAggregate agg = evaluate_run(eval_cfg, path, derive_seed(cfg.bench_seed, kValidScenario),
                                               cfg.validation_scenarios, "");
        if (agg.mean_efficiency > best_eff) { // ties keep the earlier checkpoint
            best_eff = agg.mean_efficiency;
            best = path;
        }
    }
    return best;
}

void emit_training_csv(const std::string& log_path, const std::string& out_csv) {
    std::ifstream in(log_path);
    if (!in) throw std::runtime_error("emit-plot-data: cannot open " + log_path);
    std::ofstream out(out_csv, std::ios::trunc);
    if (!out) throw std::runtime_error("emit-plot-data: cannot write " + out_csv);
    out << "episode,reward,collected_pct,completion_time_s,energy_efficiency,epsilon,loss_avg\n";
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        out << j["episode"].get<int64_t>() << "," << format_double(j["reward"].get<double>()) << ","
            << format_double(j["collected_pct"].get<double>()) << ","
            << format_double(j["completion_time_s"].get<double>()) << ","
            << format_double(j["energy_efficiency"].get<double>()) << ","
            << format_double(j["epsilon"].get<double>()) << ","
            << format_double(j["loss_avg"].get<double>()) << "\n";
    }
}

void emit_sweep_csv(const std::vector<std::string>& aggregate_paths, const std::string& x_key,
                    const std::string& out_csv) {
    struct Row {
        double x;
        std::string algorithm;
        double collected, completion, efficiency;
    };
    std::vector<Row> rows;
    for (const auto& path : aggregate_paths) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("emit-plot-data: cannot open " + path);
        nlohmann::json j;
        in >> j;
        if (!j.contains(x_key)) throw std::runtime_error("emit-plot-data: '" + x_key + "' not in " + path);
        rows.push_back({j[x_key].get<double>(), j["algorithm"].get<std::string>(),
                        j["mean_collected_pct"].get<double>(), j["mean_completion_s"].get<double>(),
                        j["mean_efficiency"].get<double>()});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.x < b.x; });
    std::ofstream out(out_csv, std::ios::trunc);
    if (!out) throw std::runtime_error("emit-plot-data: cannot write " + out_csv);
    out << x_key << ",algorithm,collected_pct,completion_time_s,energy_efficiency\n";
    for (const auto& r : rows)
        out << format_double(r.x) << "," << r.algorithm << "," << format_double(r.collected) << ","
            << format_double(r.completion) << "," << format_double(r.efficiency) << "\n";
}

} // namespace uavsim::harness
