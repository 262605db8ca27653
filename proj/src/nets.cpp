#include "uavsim/nets.hpp"

namespace uavsim::aqmix {

void obs_to_vec(const world::CompactObs& obs, int agent, int num_agents, int grid_h,
                int num_actions, float* out) {
    const int cells = grid_h * grid_h;
    int k = 0;
    out[k++] = obs.energy_frac;
    out[k++] = static_cast<float>(obs.cell % grid_h) / static_cast<float>(grid_h - 1);
    out[k++] = static_cast<float>(obs.cell / grid_h) / static_cast<float>(grid_h - 1);
    for (int c = 0; c < cells; ++c)
        out[k++] = (obs.map_words[static_cast<size_t>(c >> 6)] >> (c & 63)) & 1u ? 1.0f : 0.0f;
    for (float w : obs.window_demand) out[k++] = w;
    for (int n = 0; n < num_agents; ++n) out[k++] = n == agent ? 1.0f : 0.0f;
    for (int a = 0; a < num_actions; ++a) out[k++] = obs.last_action == a ? 1.0f : 0.0f;
}

void state_to_vec(const world::CompactState& st, int num_agents, int grid_h, int pool_kernel,
                  float* out) {
    const int p = learncore::pooled_side(grid_h, pool_kernel);
    const int cells = grid_h * grid_h;
    const size_t words = static_cast<size_t>((cells + 63) / 64);
    int k = 0;
    for (int n = 0; n < num_agents; ++n) {
        out[k++] = static_cast<float>(st.cells[static_cast<size_t>(n)] % grid_h) /
                   static_cast<float>(grid_h - 1);
        out[k++] = static_cast<float>(st.cells[static_cast<size_t>(n)] / grid_h) /
                   static_cast<float>(grid_h - 1);
    }
    for (int n = 0; n < num_agents; ++n) out[k++] = st.energy_frac[static_cast<size_t>(n)];
    for (int map = 0; map <= num_agents; ++map) {
        float* pooled = out + k;
        for (int i = 0; i < p * p; ++i) pooled[i] = 0.0f;
        const uint64_t* w = st.map_words.data() + static_cast<size_t>(map) * words;
        for (int c = 0; c < cells; ++c) {
            if (!((w[c >> 6] >> (c & 63)) & 1u)) continue;
            const int row = c / grid_h, col = c % grid_h;
            pooled[(row / pool_kernel) * p + (col / pool_kernel)] += 1.0f;
        }
        k += p * p;
    }
}

AgentNetParams::AgentNetParams(int input_dim, int hidden_dim, int num_actions)
    : w_in(hidden_dim, input_dim), b_in(hidden_dim, 1), gru(hidden_dim, hidden_dim),
      w_out(num_actions, hidden_dim), b_out(num_actions, 1),
      hidden(hidden_dim), input(input_dim), actions(num_actions) {}

void AgentNetParams::init(std::mt19937_64& rng) {
    learncore::fanin_uniform_init(w_in.value, rng);
    learncore::fanin_uniform_init(b_in.value, rng);
    learncore::fanin_uniform_init(gru.wz.value, rng);
    learncore::fanin_uniform_init(gru.wr.value, rng);
    learncore::fanin_uniform_init(gru.wn.value, rng);
    learncore::orthogonal_init(gru.uz.value, rng);
    learncore::orthogonal_init(gru.ur.value, rng);
    learncore::orthogonal_init(gru.un.value, rng);
    gru.bz.value.setZero();
    gru.br.value.setZero();
    gru.bn.value.setZero();
    learncore::fanin_uniform_init(w_out.value, rng);
    learncore::fanin_uniform_init(b_out.value, rng);
}

std::vector<Tensor<float>*> AgentNetParams::tensors() {
    std::vector<Tensor<float>*> out = {&w_in, &b_in};
    for (auto* t : gru.tensors()) out.push_back(t);
    out.push_back(&w_out);
    out.push_back(&b_out);
    return out;
}

std::vector<learncore::NamedTensor> AgentNetParams::named(const std::string& prefix) {
    return {
        {prefix + "/w_in", &w_in},   {prefix + "/b_in", &b_in},
        {prefix + "/gru/wz", &gru.wz}, {prefix + "/gru/uz", &gru.uz}, {prefix + "/gru/bz", &gru.bz},
        {prefix + "/gru/wr", &gru.wr}, {prefix + "/gru/ur", &gru.ur}, {prefix + "/gru/br", &gru.br},
        {prefix + "/gru/wn", &gru.wn}, {prefix + "/gru/un", &gru.un}, {prefix + "/gru/bn", &gru.bn},
        {prefix + "/w_out", &w_out}, {prefix + "/b_out", &b_out},
    };
}

Vec<float> agent_forward_single(const AgentNetParams& net, const Vec<float>& obs,
                                Vec<float>& hidden) {
    Mat<float> x = learncore::relu_forward<float>(
        learncore::dense_forward<float>(net.w_in, net.b_in, Mat<float>(obs)));
    Mat<float> h = learncore::gru_forward<float>(net.gru, x, Mat<float>(hidden));
    hidden = h.col(0);
    return learncore::dense_forward<float>(net.w_out, net.b_out, h).col(0);
}

Mat<float> agent_forward_batch(const AgentNetParams& net, const Mat<float>& obs,
                               const Mat<float>& h_prev, AgentStepCache* cache) {
    Mat<float> x =
        learncore::relu_forward<float>(learncore::dense_forward<float>(net.w_in, net.b_in, obs));
    Mat<float> h =
        learncore::gru_forward<float>(net.gru, x, h_prev, cache ? &cache->gru : nullptr);
    Mat<float> q = learncore::dense_forward<float>(net.w_out, net.b_out, h);
    if (cache) {
        cache->obs = obs;
        cache->x = std::move(x);
        cache->h = h;
    }
    return q;
}

Mat<float> agent_backward_batch(AgentNetParams& net, const AgentStepCache& cache,
                                const Mat<float>& dq, const Mat<float>& dh_carry) {
    Mat<float> dh = dh_carry;
    if (dq.size() > 0) {
        if (dh.size() == 0) dh = Mat<float>::Zero(cache.h.rows(), cache.h.cols());
        Mat<float> dh_from_q;
        learncore::dense_backward<float>(net.w_out, net.b_out, cache.h, dq, &dh_from_q);
        dh += dh_from_q;
    }
    Mat<float> dx, dh_prev;
    learncore::gru_backward<float>(net.gru, cache.gru, dh, dx, dh_prev);
    Mat<float> dpre = learncore::relu_backward<float>(cache.x, dx);
    learncore::dense_backward<float>(net.w_in, net.b_in, cache.obs, dpre);
    return dh_prev;
}

void mixer_init(MixerParams& m, std::mt19937_64& rng) {
    for (auto* t : m.tensors()) learncore::fanin_uniform_init(t->value, rng);
}

std::vector<learncore::NamedTensor> mixer_named(MixerParams& m, const std::string& prefix) {
    return {
        {prefix + "/hw1_w", &m.hw1_w}, {prefix + "/hw1_b", &m.hw1_b},
        {prefix + "/hb1_w", &m.hb1_w}, {prefix + "/hb1_b", &m.hb1_b},
        {prefix + "/hw2_w", &m.hw2_w}, {prefix + "/hw2_b", &m.hw2_b},
        {prefix + "/hb2_w", &m.hb2_w}, {prefix + "/hb2_b", &m.hb2_b},
    };
}

MixerParamsT<double> to_double(const MixerParams& m) {
    MixerParamsT<double> out(m.state, m.agents, m.hidden);
    auto dst = out.tensors();
    auto src = const_cast<MixerParams&>(m).tensors();
    for (size_t i = 0; i < dst.size(); ++i) dst[i]->value = src[i]->value.cast<double>();
    return out;
}

} // namespace uavsim::aqmix
