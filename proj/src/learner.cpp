#include "uavsim/learner.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <thread>

namespace uavsim::aqmix {

// Per-episode replay index: which agents decided at each global step, and the
// decision index of every agent active at each step.
struct EpisodeIndex {
    // deciders[j]: (agent, decision index) pairs whose decision happened at t_j
    std::vector<std::vector<std::pair<int, int>>> deciders;
    // active[j*N + n]: decision index of agent n in force during interval j, -1 if none
    std::vector<int> active;
};

namespace {

EpisodeIndex build_index(const world::EpisodeRecord& ep) {
    const int n_agents = ep.num_agents;
    const int t = static_cast<int>(ep.steps.size());
    EpisodeIndex idx;
    idx.deciders.resize(static_cast<size_t>(t));
    idx.active.assign(static_cast<size_t>(t) * static_cast<size_t>(n_agents), -1);
    std::vector<int> cursor(static_cast<size_t>(n_agents), 0);
    std::vector<int> current(static_cast<size_t>(n_agents), -1);
    for (int j = 0; j < t; ++j) {
        for (int n = 0; n < n_agents; ++n) {
            const auto& dps = ep.decisions[static_cast<size_t>(n)];
            int& c = cursor[static_cast<size_t>(n)];
            if (c < static_cast<int>(dps.size()) && dps[static_cast<size_t>(c)].step == j) {
                idx.deciders[static_cast<size_t>(j)].emplace_back(n, c);
                current[static_cast<size_t>(n)] = c;
                ++c;
            }
            idx.active[static_cast<size_t>(j) * static_cast<size_t>(n_agents) +
                       static_cast<size_t>(n)] = current[static_cast<size_t>(n)];
        }
    }
    return idx;
}

float max_legal(const Eigen::Ref<const Vec<float>>& q, uint8_t legal_mask) {
    float best = -std::numeric_limits<float>::infinity();
    for (int a = 0; a < static_cast<int>(q.size()); ++a)
        if (legal_mask & (1u << a)) best = std::max(best, q(a));
    return best;
}

int decider_index(const EpisodeIndex& idx, int step, int agent) {
    for (const auto& [n, k] : idx.deciders[static_cast<size_t>(step)])
        if (n == agent) return k;
    return -1;
}

} // namespace

// One contiguous group of lanes processed by a single thread.
struct LaneSlice {
    std::vector<int> lanes; // global lane ids
    int max_len = 0;
    std::vector<AgentStepCache> cache; // primary forward caches, per step
    std::vector<Mat<float>> q, qt, dq; // [A x cols] per step
};

struct Learner::Batch {
    std::vector<const world::EpisodeRecord*> episodes;
    std::vector<EpisodeIndex> index;
    int num_lanes = 0;
    std::vector<int> lane_len;
    std::vector<int> lane_slice, lane_col;
    std::vector<LaneSlice> slices;
    double loss_sum = 0.0;
    size_t loss_terms = 0;
    double norm = 1.0;

    int lane_of(int episode, int agent, int num_agents) const {
        return episode * num_agents + agent;
    }
};

Learner::Learner(const LearnerConfig& cfg)
    : cfg_(cfg),
      agent_(obs_dim(cfg.grid_h, cfg.num_agents, cfg.num_actions), cfg.hidden, cfg.num_actions),
      agent_target_(),
      mixer_(pooled_state_dim(cfg.grid_h, cfg.pool_kernel, cfg.num_agents), cfg.num_agents,
             cfg.mix_hidden),
      mixer_target_(),
      opt_(learncore::AdamConfig{cfg.lr, 0.9f, 0.999f, 1e-8f}) {
    std::mt19937_64 agent_rng(cfg.agent_init_seed);
    agent_.init(agent_rng);
    std::mt19937_64 mixer_rng(cfg.mixer_init_seed);
    mixer_init(mixer_, mixer_rng);
    agent_target_ = agent_;
    mixer_target_ = mixer_;
}

std::vector<learncore::NamedTensor> Learner::named_tensors() {
    auto out = agent_.named("agent");
    auto tgt = agent_target_.named("agent_target");
    out.insert(out.end(), tgt.begin(), tgt.end());
    if (cfg_.mode == LossMode::kMonotonicMix) {
        auto m = mixer_named(mixer_, "mixer");
        out.insert(out.end(), m.begin(), m.end());
        auto mt = mixer_named(mixer_target_, "mixer_target");
        out.insert(out.end(), mt.begin(), mt.end());
    }
    return out;
}

void Learner::save(const std::string& path, uint64_t episode) {
    learncore::save_checkpoint(path, named_tensors(), {episode, train_steps_});
}

uint64_t Learner::load(const std::string& path) {
    const auto meta = learncore::load_checkpoint(path, named_tensors());
    train_steps_ = meta.train_steps;
    return meta.episode;
}

void Learner::forward_lanes(Batch& b) const {
    const int n_agents = cfg_.num_agents;
    const int a_dim = cfg_.num_actions;
    const int in_dim = agent_.input;

    auto run_slice = [&](LaneSlice& sl) {
        const int cols = static_cast<int>(sl.lanes.size());
        if (cols == 0 || sl.max_len == 0) return;
        sl.cache.resize(static_cast<size_t>(sl.max_len));
        sl.q.resize(static_cast<size_t>(sl.max_len));
        sl.qt.resize(static_cast<size_t>(sl.max_len));
        sl.dq.resize(static_cast<size_t>(sl.max_len));

        Mat<float> obs = Mat<float>::Zero(in_dim, cols);
        Mat<float> h = Mat<float>::Zero(cfg_.hidden, cols);
        Mat<float> ht = Mat<float>::Zero(cfg_.hidden, cols);
        for (int k = 0; k < sl.max_len; ++k) {
            obs.setZero();
            for (int c = 0; c < cols; ++c) {
                const int lane = sl.lanes[static_cast<size_t>(c)];
                if (b.lane_len[static_cast<size_t>(lane)] <= k) continue;
                const int e = lane / n_agents, n = lane % n_agents;
                const auto& dp =
                    b.episodes[static_cast<size_t>(e)]->decisions[static_cast<size_t>(n)][static_cast<size_t>(k)];
                obs_to_vec(dp.obs, n, n_agents, cfg_.grid_h, a_dim, obs.col(c).data());
            }
            auto& cache = sl.cache[static_cast<size_t>(k)];
            sl.q[static_cast<size_t>(k)] = agent_forward_batch(agent_, obs, h, &cache);
            h = cache.h;
            sl.qt[static_cast<size_t>(k)] = agent_forward_batch(agent_target_, obs, ht, nullptr);
            {
                // target hidden chain, recomputed without caching
                Mat<float> xt = learncore::relu_forward<float>(
                    learncore::dense_forward<float>(agent_target_.w_in, agent_target_.b_in, obs));
                ht = learncore::gru_forward<float>(agent_target_.gru, xt, ht, nullptr);
            }
            sl.dq[static_cast<size_t>(k)] = Mat<float>::Zero(a_dim, cols);
        }
    };

    if (b.slices.size() > 1) {
        std::vector<std::thread> workers;
        for (auto& sl : b.slices) workers.emplace_back(run_slice, std::ref(sl));
        for (auto& w : workers) w.join();
    } else if (!b.slices.empty()) {
        run_slice(b.slices[0]);
    }
}

double Learner::loss_pass(Batch& b) {
    const int n_agents = cfg_.num_agents;
    const int state_dim = mixer_.state;
    const bool monotonic = cfg_.mode == LossMode::kMonotonicMix;

    // Total number of error terms, for a stable mean-loss normalization.
    size_t terms = 0;
    for (size_t e = 0; e < b.episodes.size(); ++e) {
        if (monotonic) {
            terms += b.episodes[e]->steps.size();
        } else {
            for (const auto& d : b.index[e].deciders) terms += d.size();
        }
    }
    b.norm = terms > 0 ? static_cast<double>(terms) : 1.0;

    const size_t n_threads = b.slices.size();
    std::vector<MixerParams> mixer_bufs;
    std::vector<double> losses(n_threads, 0.0);
    for (size_t t = 0; t < n_threads; ++t) {
        mixer_bufs.push_back(mixer_);
        for (auto* ten : mixer_bufs.back().tensors()) ten->zero_grad();
    }

    auto run_range = [&](size_t thread_id, size_t e0, size_t e1) {
        MixerParams& mix_buf = mixer_bufs[thread_id];
        Vec<float> state(state_dim), state_next(state_dim);
        Vec<float> utils(n_agents), tutils(n_agents);
        for (size_t e = e0; e < e1; ++e) {
            const auto& ep = *b.episodes[e];
            const auto& idx = b.index[e];
            const int t_len = static_cast<int>(ep.steps.size());
            for (int j = 0; j < t_len; ++j) {
                const auto& step = ep.steps[static_cast<size_t>(j)];

                // TD target.
                double y = step.reward;
                if (!step.terminal && j + 1 < t_len) {
                    const auto& next = ep.steps[static_cast<size_t>(j + 1)];
                    double boot = 0.0;
                    if (monotonic) {
                        for (int n = 0; n < n_agents; ++n) {
                            const uint8_t code = next.inflight[static_cast<size_t>(n)];
                            float v = 0.0f;
                            const int kd = decider_index(idx, j + 1, n);
                            if (kd >= 0) {
                                const int lane = b.lane_of(static_cast<int>(e), n, n_agents);
                                const auto& sl = b.slices[static_cast<size_t>(b.lane_slice[static_cast<size_t>(lane)])];
                                const int col = b.lane_col[static_cast<size_t>(lane)];
                                const auto& dp = ep.decisions[static_cast<size_t>(n)][static_cast<size_t>(kd)];
                                v = max_legal(sl.qt[static_cast<size_t>(kd)].col(col), dp.legal_mask);
                            } else if (code <= world::kLeft) {
                                const int ka = idx.active[static_cast<size_t>(j + 1) * static_cast<size_t>(n_agents) +
                                                          static_cast<size_t>(n)];
                                const int lane = b.lane_of(static_cast<int>(e), n, n_agents);
                                const auto& sl = b.slices[static_cast<size_t>(b.lane_slice[static_cast<size_t>(lane)])];
                                const int col = b.lane_col[static_cast<size_t>(lane)];
                                v = sl.qt[static_cast<size_t>(ka)](code, col);
                            }
                            tutils(n) = v;
                        }
                        state_to_vec(next.state, n_agents, cfg_.grid_h, cfg_.pool_kernel,
                                     state_next.data());
                        boot = mixer_forward<float>(mixer_target_, state_next, tutils, nullptr);
                    } else {
                        const auto& nd = idx.deciders[static_cast<size_t>(j + 1)];
                        if (!nd.empty()) {
                            const auto [n, kd] = nd.front();
                            const int lane = b.lane_of(static_cast<int>(e), n, n_agents);
                            const auto& sl = b.slices[static_cast<size_t>(b.lane_slice[static_cast<size_t>(lane)])];
                            const int col = b.lane_col[static_cast<size_t>(lane)];
                            const auto& dp = ep.decisions[static_cast<size_t>(n)][static_cast<size_t>(kd)];
                            boot = max_legal(sl.qt[static_cast<size_t>(kd)].col(col), dp.legal_mask);
                        }
                    }
                    y += std::pow(static_cast<double>(cfg_.gamma), step.duration) * boot;
                }

                if (monotonic) {
                    for (int n = 0; n < n_agents; ++n) {
                        const uint8_t code = step.inflight[static_cast<size_t>(n)];
                        float v = 0.0f;
                        if (code <= world::kLeft) {
                            const int ka = idx.active[static_cast<size_t>(j) * static_cast<size_t>(n_agents) +
                                                      static_cast<size_t>(n)];
                            const int lane = b.lane_of(static_cast<int>(e), n, n_agents);
                            const auto& sl = b.slices[static_cast<size_t>(b.lane_slice[static_cast<size_t>(lane)])];
                            const int col = b.lane_col[static_cast<size_t>(lane)];
                            v = sl.q[static_cast<size_t>(ka)](code, col);
                        }
                        utils(n) = v;
                    }
                    state_to_vec(step.state, n_agents, cfg_.grid_h, cfg_.pool_kernel, state.data());
                    MixerCache<float> cache;
                    const float q_tot = mixer_forward<float>(mix_buf, state, utils, &cache);
                    const double err = static_cast<double>(q_tot) - y;
                    losses[thread_id] += err * err;
                    const float dq_tot = static_cast<float>(2.0 * err / b.norm);
                    Vec<float> dutils = mixer_backward<float>(mix_buf, cache, dq_tot);
                    for (int n = 0; n < n_agents; ++n) {
                        const uint8_t code = step.inflight[static_cast<size_t>(n)];
                        if (code > world::kLeft) continue;
                        const int ka = idx.active[static_cast<size_t>(j) * static_cast<size_t>(n_agents) +
                                                  static_cast<size_t>(n)];
                        const int lane = b.lane_of(static_cast<int>(e), n, n_agents);
                        auto& sl = b.slices[static_cast<size_t>(b.lane_slice[static_cast<size_t>(lane)])];
                        const int col = b.lane_col[static_cast<size_t>(lane)];
                        sl.dq[static_cast<size_t>(ka)](code, col) += dutils(n);
                    }
                } else {
                    for (const auto& [n, kd] : idx.deciders[static_cast<size_t>(j)]) {
                        const auto& dp = ep.decisions[static_cast<size_t>(n)][static_cast<size_t>(kd)];
                        const int lane = b.lane_of(static_cast<int>(e), n, n_agents);
                        auto& sl = b.slices[static_cast<size_t>(b.lane_slice[static_cast<size_t>(lane)])];
                        const int col = b.lane_col[static_cast<size_t>(lane)];
                        const float q_val = sl.q[static_cast<size_t>(kd)](dp.action, col);
                        const double err = static_cast<double>(q_val) - y;
                        losses[thread_id] += err * err;
                        sl.dq[static_cast<size_t>(kd)](dp.action, col) +=
                            static_cast<float>(2.0 * err / b.norm);
                    }
                }
            }
        }
    };

    if (n_threads > 1) {
        std::vector<std::thread> workers;
        const size_t per = (b.episodes.size() + n_threads - 1) / n_threads;
        for (size_t t = 0; t < n_threads; ++t) {
            const size_t e0 = std::min(t * per, b.episodes.size());
            const size_t e1 = std::min(e0 + per, b.episodes.size());
            workers.emplace_back(run_range, t, e0, e1);
        }
        for (auto& w : workers) w.join();
    } else {
        run_range(0, 0, b.episodes.size());
    }

    // Ordered reduction keeps the step bitwise deterministic.
    if (cfg_.mode == LossMode::kMonotonicMix) {
        auto dst = mixer_.tensors();
        for (auto& buf : mixer_bufs) {
            auto src = buf.tensors();
            for (size_t i = 0; i < dst.size(); ++i) dst[i]->grad += src[i]->grad;
        }
    }
    double loss = 0.0;
    for (double l : losses) loss += l;
    b.loss_sum = loss;
    b.loss_terms = terms;
    return loss;
}

void Learner::backward_lanes(Batch& b) {
    std::vector<AgentNetParams> bufs;
    for (size_t s = 0; s < b.slices.size(); ++s) {
        bufs.push_back(agent_);
        for (auto* t : bufs.back().tensors()) t->zero_grad();
    }

    auto run_slice = [&](size_t si) {
        LaneSlice& sl = b.slices[si];
        if (sl.lanes.empty() || sl.max_len == 0) return;
        AgentNetParams& net = bufs[si];
        Mat<float> dh;
        for (int k = sl.max_len - 1; k >= 0; --k) {
            dh = agent_backward_batch(net, sl.cache[static_cast<size_t>(k)],
                                      sl.dq[static_cast<size_t>(k)], dh);
        }
    };

    if (b.slices.size() > 1) {
        std::vector<std::thread> workers;
        for (size_t s = 0; s < b.slices.size(); ++s) workers.emplace_back(run_slice, s);
        for (auto& w : workers) w.join();
    } else if (!b.slices.empty()) {
        run_slice(0);
    }

    auto dst = agent_.tensors();
    for (auto& buf : bufs) {
        auto src = buf.tensors();
        for (size_t i = 0; i < dst.size(); ++i) dst[i]->grad += src[i]->grad;
    }
}

float Learner::train_step(const ReplayBuffer& buffer, std::mt19937_64& sample_rng) {
    if (buffer.size() < static_cast<size_t>(cfg_.batch_episodes))
        throw std::logic_error("train_step: buffer holds fewer episodes than the batch size");

    Batch b;
    {
        std::vector<size_t> ids(buffer.size());
        for (size_t i = 0; i < ids.size(); ++i) ids[i] = i;
        for (int k = 0; k < cfg_.batch_episodes; ++k) {
            std::uniform_int_distribution<size_t> pick(static_cast<size_t>(k), ids.size() - 1);
            std::swap(ids[static_cast<size_t>(k)], ids[pick(sample_rng)]);
            b.episodes.push_back(&buffer.episode(ids[static_cast<size_t>(k)]));
        }
    }
    for (const auto* ep : b.episodes) b.index.push_back(build_index(*ep));

    const int n_agents = cfg_.num_agents;
    b.num_lanes = static_cast<int>(b.episodes.size()) * n_agents;
    b.lane_len.resize(static_cast<size_t>(b.num_lanes));
    b.lane_slice.resize(static_cast<size_t>(b.num_lanes));
    b.lane_col.resize(static_cast<size_t>(b.num_lanes));
    for (int l = 0; l < b.num_lanes; ++l)
        b.lane_len[static_cast<size_t>(l)] = static_cast<int>(
            b.episodes[static_cast<size_t>(l / n_agents)]->decisions[static_cast<size_t>(l % n_agents)].size());

    const int n_slices = std::max(1, std::min(cfg_.threads, b.num_lanes));
    b.slices.resize(static_cast<size_t>(n_slices));
    for (int l = 0; l < b.num_lanes; ++l) {
        const int s = l * n_slices / b.num_lanes;
        b.lane_slice[static_cast<size_t>(l)] = s;
        b.lane_col[static_cast<size_t>(l)] = static_cast<int>(b.slices[static_cast<size_t>(s)].lanes.size());
        b.slices[static_cast<size_t>(s)].lanes.push_back(l);
        b.slices[static_cast<size_t>(s)].max_len =
            std::max(b.slices[static_cast<size_t>(s)].max_len, b.lane_len[static_cast<size_t>(l)]);
    }

    for (auto* t : agent_.tensors()) t->zero_grad();
    for (auto* t : mixer_.tensors()) t->zero_grad();

    forward_lanes(b);
    loss_pass(b);
    backward_lanes(b);

    std::vector<Tensor<float>*> params = agent_.tensors();
    if (cfg_.mode == LossMode::kMonotonicMix)
        for (auto* t : mixer_.tensors()) params.push_back(t);
    learncore::clip_grad_norm(params, cfg_.grad_clip_norm);
    opt_.step(params);

    learncore::soft_update(agent_target_.tensors(), agent_.tensors(), cfg_.soft_update_rate);
    if (cfg_.mode == LossMode::kMonotonicMix)
        learncore::soft_update(mixer_target_.tensors(), mixer_.tensors(), cfg_.soft_update_rate);

    ++train_steps_;
    return static_cast<float>(b.loss_sum / b.norm);
}

float Learner::replay_utility_deviation(const world::EpisodeRecord& ep) {
    float max_dev = 0.0f;
    Vec<float> obs(agent_.input);
    for (int n = 0; n < ep.num_agents; ++n) {
        Vec<float> h = Vec<float>::Zero(cfg_.hidden);
        for (const auto& dp : ep.decisions[static_cast<size_t>(n)]) {
            obs_to_vec(dp.obs, n, ep.num_agents, cfg_.grid_h, cfg_.num_actions, obs.data());
            const Vec<float> q = agent_forward_single(agent_, obs, h);
            for (int a = 0; a < cfg_.num_actions; ++a)
                max_dev = std::max(max_dev, std::abs(q(a) - dp.utilities[static_cast<size_t>(a)]));
        }
    }
    return max_dev;
}

// ---------------------------------------------------------------------------

EpsGreedyPolicy::EpsGreedyPolicy(const AgentNetParams& net, int num_agents, int grid_h,
                                 double epsilon, uint64_t rng_seed)
    : net_(net), num_agents_(num_agents), grid_h_(grid_h), epsilon_(epsilon), rng_(rng_seed) {}

void EpsGreedyPolicy::begin_episode() {
    hidden_.assign(static_cast<size_t>(num_agents_), Vec<float>::Zero(net_.hidden));
}

int EpsGreedyPolicy::decide(const world::DecisionContext& ctx) {
    Vec<float> obs(net_.input);
    obs_to_vec(*ctx.obs, ctx.agent, num_agents_, grid_h_, net_.actions, obs.data());
    const Vec<float> q = agent_forward_single(net_, obs, hidden_[static_cast<size_t>(ctx.agent)]);
    for (int a = 0; a < net_.actions; ++a) last_utils_[static_cast<size_t>(a)] = q(a);

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const bool explore = unif(rng_) < epsilon_;
    if (explore) {
        int legal[5], n_legal = 0;
        for (int a = 0; a < 5; ++a)
            if (ctx.mask[static_cast<size_t>(a)]) legal[n_legal++] = a;
        std::uniform_int_distribution<int> pick(0, n_legal - 1);
        return legal[pick(rng_)];
    }
    int best = -1;
    for (int a = 0; a < 5; ++a) {
        if (!ctx.mask[static_cast<size_t>(a)]) continue;
        if (best < 0 || q(a) > q(best)) best = a;
    }
    return best;
}

int RandomPolicy::decide(const world::DecisionContext& ctx) {
    int legal[5], n_legal = 0;
    for (int a = 0; a < 5; ++a)
        if (ctx.mask[static_cast<size_t>(a)]) legal[n_legal++] = a;
    std::uniform_int_distribution<int> pick(0, n_legal - 1);
    return legal[pick(rng_)];
}

// ---------------------------------------------------------------------------

bool lemma1_check(const MixFn& mixer, const std::vector<std::vector<double>>& utilities,
                  const std::vector<int>& frozen_actions, int actor) {
    const int n = static_cast<int>(utilities.size());
    const int a_dim = static_cast<int>(utilities[0].size());

    // Conditioned value: non-actor coordinates are pinned to the frozen
    // ongoing actions regardless of the enumerated joint action.
    std::vector<double> utils(static_cast<size_t>(n));
    for (int m = 0; m < n; ++m)
        if (m != actor)
            utils[static_cast<size_t>(m)] =
                utilities[static_cast<size_t>(m)][static_cast<size_t>(frozen_actions[static_cast<size_t>(m)])];

    long total = 1;
    for (int m = 0; m < n; ++m) total *= a_dim;
    double best_val = -std::numeric_limits<double>::infinity();
    int best_actor_action = -1;
    for (long code = 0; code < total; ++code) {
        long rest = code;
        int actor_action = 0;
        for (int m = 0; m < n; ++m) {
            const int u = static_cast<int>(rest % a_dim);
            rest /= a_dim;
            if (m == actor) actor_action = u;
        }
        utils[static_cast<size_t>(actor)] =
            utilities[static_cast<size_t>(actor)][static_cast<size_t>(actor_action)];
        const double v = mixer(utils);
        if (v > best_val) {
            best_val = v;
            best_actor_action = actor_action;
        }
    }

    int greedy = 0;
    for (int a = 1; a < a_dim; ++a)
        if (utilities[static_cast<size_t>(actor)][static_cast<size_t>(a)] >
            utilities[static_cast<size_t>(actor)][static_cast<size_t>(greedy)])
            greedy = a;
    utils[static_cast<size_t>(actor)] =
        utilities[static_cast<size_t>(actor)][static_cast<size_t>(greedy)];
    return mixer(utils) == best_val && best_actor_action == greedy;
}

bool joint_greedy_consistency(const MixFn& mixer,
                              const std::vector<std::vector<double>>& utilities) {
    const int n = static_cast<int>(utilities.size());
    const int a_dim = static_cast<int>(utilities[0].size());
    long total = 1;
    for (int m = 0; m < n; ++m) total *= a_dim;

    std::vector<double> utils(static_cast<size_t>(n));
    double best_val = -std::numeric_limits<double>::infinity();
    for (long code = 0; code < total; ++code) {
        long rest = code;
        for (int m = 0; m < n; ++m) {
            utils[static_cast<size_t>(m)] =
                utilities[static_cast<size_t>(m)][static_cast<size_t>(rest % a_dim)];
            rest /= a_dim;
        }
        best_val = std::max(best_val, mixer(utils));
    }

    for (int m = 0; m < n; ++m) {
        int greedy = 0;
        for (int a = 1; a < a_dim; ++a)
            if (utilities[static_cast<size_t>(m)][static_cast<size_t>(a)] >
                utilities[static_cast<size_t>(m)][static_cast<size_t>(greedy)])
                greedy = a;
        utils[static_cast<size_t>(m)] = utilities[static_cast<size_t>(m)][static_cast<size_t>(greedy)];
    }
    return mixer(utils) == best_val;
}

} // namespace uavsim::aqmix
