#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>

#include "uavsim/config.hpp"
#include "uavsim/learner.hpp"
#include "uavsim/nets.hpp"
#include "uavsim/runner.hpp"
#include "uavsim/util.hpp"

using namespace uavsim;

namespace {

harness::ExperimentConfig load_or_default(const std::string& path, bool report_overrides) {
    if (path.empty()) return {};
    const auto loaded = harness::load_config_file(path);
    if (report_overrides)
        for (const auto& [key, value] : loaded.overrides)
            std::cerr << "config override: " << key << " = " << value << "\n";
    return loaded.config;
}

int run_lemma_check(int agents, int actions, int trials, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> pick_action(0, actions - 1);
    std::uniform_int_distribution<int> pick_agent(0, agents - 1);

    const int state_dim = aqmix::pooled_state_dim(8, 3, agents);
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
        aqmix::MixerParams mixer(state_dim, agents, 32);
        std::mt19937_64 init_rng(derive_seed(seed, 21, static_cast<uint64_t>(t)));
        aqmix::mixer_init(mixer, init_rng);
        aqmix::Vec<float> state(state_dim);
        for (int i = 0; i < state_dim; ++i) state(i) = static_cast<float>(unif(rng));

        std::vector<std::vector<double>> utils(static_cast<size_t>(agents),
                                               std::vector<double>(static_cast<size_t>(actions)));
        for (auto& row : utils)
            for (auto& v : row) v = unif(rng);
        std::vector<int> frozen(static_cast<size_t>(agents));
        for (auto& f : frozen) f = pick_action(rng);
        const int actor = pick_agent(rng);

        auto mix = [&](const std::vector<double>& u) {
            aqmix::Vec<float> uf(agents);
            for (int n = 0; n < agents; ++n) uf(n) = static_cast<float>(u[static_cast<size_t>(n)]);
            return static_cast<double>(aqmix::mixer_forward<float>(mixer, state, uf, nullptr));
        };
        if (!aqmix::lemma1_check(mix, utils, frozen, actor)) ++failures;
        if (!aqmix::joint_greedy_consistency(mix, utils)) ++failures;
    }
    std::cout << "lemma-check: " << trials << " trials, " << failures << " failures\n";
    return failures == 0 ? 0 : 2;
}

int run_bandwidth_bench(const std::string& instance_path, const std::string& scheme,
                        double bandwidth_hz, double sigma_e2, double tx_power_w,
                        double noise_psd) {
    std::ifstream in(instance_path);
    if (!in) {
        std::cerr << "bandwidth-bench: cannot open " << instance_path << "\n";
        return 1;
    }
    bandwidth::AllocationProblem problem;
    problem.bandwidth_hz = bandwidth_hz;
    problem.channel.sigma_e2 = sigma_e2;
    problem.channel.tx_power_w = tx_power_w;
    problem.channel.noise_psd = noise_psd;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double demand = 0.0, gain = 0.0;
        ls >> demand >> gain;
        if (ls.fail()) {
            std::cerr << "bandwidth-bench: malformed line: " << line << "\n";
            return 1;
        }
        problem.demand_bits.push_back(demand);
        problem.estimated_gain.push_back(gain);
    }
    const bandwidth::AllocationResult res = scheme == "equal"
                                                ? bandwidth::equal_allocation(problem)
                                                : bandwidth::optimize_allocation(problem);
    std::cout << "scheme " << scheme << "\nhover_time_s " << format_double(res.hover_time_s) << "\n";
    for (size_t i = 0; i < res.bandwidth_hz.size(); ++i)
        std::cout << "sn " << i << " bandwidth_hz " << format_double(res.bandwidth_hz[i]) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"uavsim: asynchronous multi-UAV data-collection simulator and trainer"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "run", checkpoint, bench_out, log_path, csv_path, x_key;
    std::vector<std::string> aggregates;
    int scenarios = -1;
    uint64_t bench_seed_flag = 0;
    bool use_bench_seed = false, verbose = false;

    auto* train = app.add_subcommand("train", "train a policy and write logs/checkpoints");
    train->add_option("--config", config_path, "experiment config file");
    train->add_option("--out", out_dir, "output directory")->required();
    train->add_flag("--verbose", verbose, "progress to stderr");

    auto* eval = app.add_subcommand("evaluate", "evaluate a policy on a scenario bench");
    eval->add_option("--config", config_path, "experiment config file");
    eval->add_option("--checkpoint", checkpoint, "checkpoint file (not needed for hert)");
    eval->add_option("--out", bench_out, "per-scenario metrics JSONL output");
    eval->add_option("--scenarios", scenarios, "bench size (default from config)");
    eval->add_option("--bench-seed", bench_seed_flag, "bench seed (default from config)")
        ->each([&](const std::string&) { use_bench_seed = true; });

    auto* best = app.add_subcommand("select-best", "pick the stored checkpoint with best efficiency");
    best->add_option("--config", config_path, "experiment config file");
    std::string run_dir;
    best->add_option("--run-dir", run_dir, "training output directory")->required();

    auto* lemma = app.add_subcommand("lemma-check", "greedy/argmax equivalence battery");
    int lemma_agents = 2, lemma_actions = 5, lemma_trials = 500;
    uint64_t lemma_seed = 7;
    lemma->add_option("--agents", lemma_agents);
    lemma->add_option("--actions", lemma_actions);
    lemma->add_option("--trials", lemma_trials);
    lemma->add_option("--seed", lemma_seed);

    auto* bb = app.add_subcommand("bandwidth-bench", "solve one allocation instance file");
    std::string instance_path, scheme = "optimal";
    double bb_bandwidth = 1e6, bb_sigma = 0.0, bb_power = 0.01, bb_noise = 1e-18;
    bb->add_option("--instance", instance_path, "text file, one 'demand_bits gain' line per SN")
        ->required();
    bb->add_option("--scheme", scheme, "optimal | equal")
        ->check(CLI::IsMember({"optimal", "equal"}));
    bb->add_option("--bandwidth-hz", bb_bandwidth);
    bb->add_option("--sigma-e2", bb_sigma);
    bb->add_option("--tx-power-w", bb_power);
    bb->add_option("--noise-psd", bb_noise);

    auto* plot = app.add_subcommand("emit-plot-data", "convert logs to CSV plot series");
    plot->add_option("--training-log", log_path, "training JSONL log");
    plot->add_option("--aggregate", aggregates, "evaluation aggregate JSON files");
    plot->add_option("--x-key", x_key, "sweep variable for aggregate mode");
    plot->add_option("--out", csv_path, "CSV output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            const auto cfg = load_or_default(config_path, true);
            const auto out = harness::train_run(cfg, out_dir, !verbose);
            std::cout << "episodes " << out.episodes_run << "\nlog " << out.log_path
                      << "\nfinal_checkpoint " << out.final_checkpoint << "\n";
        } else if (*eval) {
            const auto cfg = load_or_default(config_path, true);
            const int n = scenarios > 0 ? scenarios : cfg.bench_scenarios;
            const uint64_t seed = use_bench_seed ? bench_seed_flag : cfg.bench_seed;
            const auto agg = harness::evaluate_run(cfg, checkpoint, seed, n, bench_out);
            std::cout << "scenarios " << agg.scenarios << "\nmean_reward "
                      << format_double(agg.mean_reward) << "\nmean_collected_pct "
                      << format_double(agg.mean_collected_pct) << "\nmean_completion_s "
                      << format_double(agg.mean_completion_s) << "\nmean_efficiency_bit_per_j "
                      << format_double(agg.mean_efficiency) << "\n";
        } else if (*best) {
            const auto cfg = load_or_default(config_path, true);
            std::cout << harness::best_policy_selection(cfg, run_dir) << "\n";
        } else if (*lemma) {
            return run_lemma_check(lemma_agents, lemma_actions, lemma_trials, lemma_seed);
        } else if (*bb) {
            return run_bandwidth_bench(instance_path, scheme, bb_bandwidth, bb_sigma, bb_power,
                                       bb_noise);
        } else if (*plot) {
            if (!log_path.empty()) {
                harness::emit_training_csv(log_path, csv_path);
            } else if (!aggregates.empty()) {
                if (x_key.empty()) throw ConfigError("emit-plot-data: --x-key required with --aggregate");
                harness::emit_sweep_csv(aggregates, x_key, csv_path);
            } else {
                throw ConfigError("emit-plot-data: provide --training-log or --aggregate");
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
