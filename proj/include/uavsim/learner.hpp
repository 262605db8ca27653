#pragma once

#include <deque>
#include <memory>
#include <random>

#include "uavsim/nets.hpp"
#include "uavsim/world.hpp"

namespace uavsim::aqmix {

// Episodic replay: whole episodes in FIFO order, evicted when the total
// transition count exceeds the cap (recurrent training needs in-order replay).
class ReplayBuffer {
  public:
    explicit ReplayBuffer(size_t transition_cap = 1'000'000) : cap_(transition_cap) {}

    void add(world::EpisodeRecord&& ep) {
        transitions_ += ep.transition_count();
        episodes_.push_back(std::move(ep));
        while (transitions_ > cap_ && episodes_.size() > 1) {
            transitions_ -= episodes_.front().transition_count();
            episodes_.pop_front();
        }
    }

    size_t size() const { return episodes_.size(); }
    size_t transitions() const { return transitions_; }
    const world::EpisodeRecord& episode(size_t i) const { return episodes_[i]; }

  private:
    size_t cap_;
    size_t transitions_ = 0;
    std::deque<world::EpisodeRecord> episodes_;
};

// How per-agent utilities combine into the trained scalar.
enum class LossMode {
    kMonotonicMix,   // state-conditioned monotonic mixing (AQMIX / sync QMIX)
    kActingAgentOnly // no mixing: the deciding agent's own utility (AIQL)
};

struct LearnerConfig {
    int num_agents = 2;
    int grid_h = 8;
    int pool_kernel = 3;
    int hidden = 256;
    int mix_hidden = 256;
    int num_actions = 5;
    float lr = 5e-5f;
    float gamma = 0.99f;
    float soft_update_rate = 1e-2f;
    float grad_clip_norm = 10.0f;
    int batch_episodes = 32;
    int threads = 2;
    LossMode mode = LossMode::kMonotonicMix;
    uint64_t agent_init_seed = 1;
    uint64_t mixer_init_seed = 2;
};

// Owns the primary and target parameter sets and runs batched end-to-end
// training steps over replayed episodes.
class Learner {
  public:
    explicit Learner(const LearnerConfig& cfg);

    // Samples a batch of episodes, replays them in event order rebuilding each
    // agent's recurrent state at its own decision points, applies one
    // optimizer step and a soft target update.  Returns the mean squared TD
    // error of the batch.
    float train_step(const ReplayBuffer& buffer, std::mt19937_64& sample_rng);

    const LearnerConfig& config() const { return cfg_; }
    AgentNetParams& agent_net() { return agent_; }
    const AgentNetParams& agent_net() const { return agent_; }
    MixerParams& mixer() { return mixer_; }
    const MixerParams& mixer() const { return mixer_; }
    uint64_t train_steps() const { return train_steps_; }

    std::vector<learncore::NamedTensor> named_tensors();
    void save(const std::string& path, uint64_t episode) ;
    uint64_t load(const std::string& path); // returns stored episode

    // Replays one episode with the current primary net and returns the maximal
    // absolute difference between stored behaviour-time utilities and the
    // recomputed ones (parameters must be unchanged since the rollout).
    float replay_utility_deviation(const world::EpisodeRecord& ep);

  private:
    struct Batch;
    void forward_lanes(Batch& b) const;
    double loss_pass(Batch& b);
    void backward_lanes(Batch& b);

    LearnerConfig cfg_;
    AgentNetParams agent_, agent_target_;
    MixerParams mixer_, mixer_target_;
    learncore::Adam opt_;
    uint64_t train_steps_ = 0;
};

// Greedy / epsilon-greedy execution policy over the shared agent network.
class EpsGreedyPolicy : public world::Policy {
  public:
    EpsGreedyPolicy(const AgentNetParams& net, int num_agents, int grid_h, double epsilon,
                    uint64_t rng_seed);

    void begin_episode() override;
    int decide(const world::DecisionContext& ctx) override;
    const std::array<float, 5>* last_utilities() const override { return &last_utils_; }
    void set_epsilon(double eps) { epsilon_ = eps; }

  private:
    const AgentNetParams& net_;
    int num_agents_, grid_h_;
    double epsilon_;
    std::mt19937_64 rng_;
    std::vector<Vec<float>> hidden_;
    std::array<float, 5> last_utils_{};
};

// Uniformly random legal actions; used for exercising the environment.
class RandomPolicy : public world::Policy {
  public:
    explicit RandomPolicy(uint64_t seed) : rng_(seed) {}
    int decide(const world::DecisionContext& ctx) override;

  private:
    std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Greedy-consistency checks behind Lemma-style argmax equivalence.

using MixFn = std::function<double(const std::vector<double>& utilities)>;

// Enumerates all |A|^N joint actions of the conditioned value (non-actor
// coordinates pinned to their frozen actions) and verifies the maximizer
// agrees with the actor's local greedy action, value-exactly.
bool lemma1_check(const MixFn& mixer, const std::vector<std::vector<double>>& utilities,
                  const std::vector<int>& frozen_actions, int actor);

// Unconditioned variant: brute-force joint argmax equals per-agent argmaxes.
bool joint_greedy_consistency(const MixFn& mixer,
                              const std::vector<std::vector<double>>& utilities);

} // namespace uavsim::aqmix
