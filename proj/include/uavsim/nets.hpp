#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

#include "uavsim/learncore.hpp"
#include "uavsim/world.hpp"

namespace uavsim::aqmix {

using learncore::GruCache;
using learncore::GruParams;
using learncore::Mat;
using learncore::Tensor;
using learncore::Vec;

// ---------------------------------------------------------------------------
// Input layouts.
//
// Observation vector: [energy, col, row, own map (H^2), 3x3 window demand,
// agent one-hot (N), last-action one-hot (A)].
// State vector: [per-UAV col,row (2N), per-UAV energy (N), sum-pooled per-UAV
// maps and true map ((N+1)*P^2)], P = ceil(H/M).

inline int obs_dim(int grid_h, int num_agents, int num_actions = 5) {
    return 3 + grid_h * grid_h + 9 + num_agents + num_actions;
}

inline int pooled_state_dim(int grid_h, int pool_kernel, int num_agents) {
    const int p = learncore::pooled_side(grid_h, pool_kernel);
    return 3 * num_agents + (num_agents + 1) * p * p;
}

void obs_to_vec(const world::CompactObs& obs, int agent, int num_agents, int grid_h,
                int num_actions, float* out);

void state_to_vec(const world::CompactState& st, int num_agents, int grid_h, int pool_kernel,
                  float* out);

// ---------------------------------------------------------------------------
// Shared recurrent agent network: input dense + ReLU, GRU cell, linear head.

struct AgentNetParams {
    Tensor<float> w_in, b_in;
    GruParams<float> gru;
    Tensor<float> w_out, b_out;
    int hidden = 0;
    int input = 0;
    int actions = 0;

    AgentNetParams() = default;
    AgentNetParams(int input_dim, int hidden_dim, int num_actions);
    void init(std::mt19937_64& rng);
    std::vector<Tensor<float>*> tensors();
    std::vector<learncore::NamedTensor> named(const std::string& prefix);
};

// Single-column forward used during rollouts; updates the hidden state.
Vec<float> agent_forward_single(const AgentNetParams& net, const Vec<float>& obs,
                                Vec<float>& hidden);

// Batched forward over one step of many lanes (columns).
struct AgentStepCache {
    Mat<float> obs;  // input columns
    Mat<float> x;    // post-ReLU dense output
    GruCache<float> gru;
    Mat<float> h;    // new hidden state
};

Mat<float> agent_forward_batch(const AgentNetParams& net, const Mat<float>& obs,
                               const Mat<float>& h_prev, AgentStepCache* cache);

// Backward for one step; accumulates parameter grads, returns grad w.r.t. the
// previous hidden state.  dq may be empty (all-zero head gradient).
Mat<float> agent_backward_batch(AgentNetParams& net, const AgentStepCache& cache,
                                const Mat<float>& dq, const Mat<float>& dh_carry);

// ---------------------------------------------------------------------------
// Monotonic mixing network.  Two mixing layers with ELU between; weights are
// generated from the state by dense hypernetworks and passed through an
// absolute value, biases by plain dense generators.

template <typename S>
struct MixerParamsT {
    Tensor<S> hw1_w, hw1_b; // -> mix_hidden*N mixing weights (abs)
    Tensor<S> hb1_w, hb1_b; // -> mix_hidden bias
    Tensor<S> hw2_w, hw2_b; // -> mix_hidden mixing weights (abs)
    Tensor<S> hb2_w, hb2_b; // -> scalar bias
    int state = 0, agents = 0, hidden = 0;

    MixerParamsT() = default;
    MixerParamsT(int state_dim, int num_agents, int mix_hidden)
        : hw1_w(mix_hidden * num_agents, state_dim), hw1_b(mix_hidden * num_agents, 1),
          hb1_w(mix_hidden, state_dim), hb1_b(mix_hidden, 1),
          hw2_w(mix_hidden, state_dim), hw2_b(mix_hidden, 1),
          hb2_w(1, state_dim), hb2_b(1, 1),
          state(state_dim), agents(num_agents), hidden(mix_hidden) {}

    std::vector<Tensor<S>*> tensors() {
        return {&hw1_w, &hw1_b, &hb1_w, &hb1_b, &hw2_w, &hw2_b, &hb2_w, &hb2_b};
    }
};

using MixerParams = MixerParamsT<float>;

void mixer_init(MixerParams& m, std::mt19937_64& rng);
std::vector<learncore::NamedTensor> mixer_named(MixerParams& m, const std::string& prefix);

template <typename S>
struct MixerCache {
    Vec<S> state, utils, w1_raw, a1, h1, w2_raw;
};

template <typename S>
S mixer_forward(const MixerParamsT<S>& m, const Vec<S>& state, const Vec<S>& utils,
                MixerCache<S>* cache = nullptr) {
    Vec<S> w1_raw = m.hw1_w.value * state + m.hw1_b.value.col(0);
    Vec<S> b1 = m.hb1_w.value * state + m.hb1_b.value.col(0);
    Eigen::Map<const Mat<S>> w1(w1_raw.data(), m.hidden, m.agents);
    Vec<S> a1 = w1.cwiseAbs() * utils + b1;
    Vec<S> h1 = learncore::elu_forward<S>(a1);
    Vec<S> w2_raw = m.hw2_w.value * state + m.hw2_b.value.col(0);
    const S b2 = (m.hb2_w.value * state)(0) + m.hb2_b.value(0, 0);
    const S q_tot = w2_raw.cwiseAbs().dot(h1) + b2;
    if (cache) {
        cache->state = state;
        cache->utils = utils;
        cache->w1_raw = w1_raw;
        cache->a1 = a1;
        cache->h1 = h1;
        cache->w2_raw = w2_raw;
    }
    return q_tot;
}

template <typename S>
Vec<S> mixer_backward(MixerParamsT<S>& m, const MixerCache<S>& c, S dq_tot) {
    auto sign = [](S v) { return v > S(0) ? S(1) : (v < S(0) ? S(-1) : S(0)); };

    Vec<S> dw2_abs = dq_tot * c.h1;
    Vec<S> dw2_raw = dw2_abs.cwiseProduct(c.w2_raw.unaryExpr(sign));
    m.hw2_w.grad.noalias() += dw2_raw * c.state.transpose();
    m.hw2_b.grad.col(0) += dw2_raw;
    m.hb2_w.grad.row(0) += dq_tot * c.state.transpose();
    m.hb2_b.grad(0, 0) += dq_tot;

    Vec<S> dh1 = dq_tot * c.w2_raw.cwiseAbs();
    Vec<S> da1 = learncore::elu_backward<S>(Mat<S>(c.a1), Mat<S>(dh1)).col(0);
    m.hb1_w.grad.noalias() += da1 * c.state.transpose();
    m.hb1_b.grad.col(0) += da1;

    Eigen::Map<const Mat<S>> w1(c.w1_raw.data(), m.hidden, m.agents);
    Mat<S> dw1_abs = da1 * c.utils.transpose();
    Mat<S> dw1_raw = dw1_abs.cwiseProduct(w1.unaryExpr(sign));
    Eigen::Map<const Vec<S>> dw1_flat(dw1_raw.data(), dw1_raw.size());
    m.hw1_w.grad.noalias() += dw1_flat * c.state.transpose();
    m.hw1_b.grad.col(0) += dw1_flat;

    return w1.cwiseAbs().transpose() * da1;
}

// f64 copy used by finite-difference verification.
MixerParamsT<double> to_double(const MixerParams& m);

} // namespace uavsim::aqmix
