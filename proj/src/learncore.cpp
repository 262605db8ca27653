#include "uavsim/learncore.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace uavsim::learncore {

GradCheckResult grad_check(const std::vector<Tensor<double>*>& params,
                           const std::function<double()>& forward_loss,
                           const std::function<void()>& backward, int samples_per_tensor,
                           std::mt19937_64& rng) {
    constexpr double kStep = 1e-4;
    for (auto* t : params) t->zero_grad();
    backward();

    GradCheckResult res;
    for (auto* t : params) {
        const Eigen::Index total = t->value.size();
        std::vector<Eigen::Index> idx(static_cast<size_t>(total));
        for (Eigen::Index i = 0; i < total; ++i) idx[static_cast<size_t>(i)] = i;
        if (total > samples_per_tensor) {
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(static_cast<size_t>(samples_per_tensor));
        }
        for (Eigen::Index i : idx) {
            double* v = t->value.data() + i;
            const double saved = *v;
            *v = saved + kStep;
            const double up = forward_loss();
            *v = saved - kStep;
            const double down = forward_loss();
            *v = saved;
            const double fd = (up - down) / (2.0 * kStep);
            const double ad = *(t->grad.data() + i);
            const double denom = std::max({std::abs(fd), std::abs(ad), 1e-6});
            res.max_rel_error = std::max(res.max_rel_error, std::abs(fd - ad) / denom);
            ++res.checked;
        }
    }
    return res;
}

namespace {

constexpr char kMagic[4] = {'A', 'Q', 'C', 'P'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

} // namespace

void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors,
                     const CheckpointMeta& meta) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    out.write(kMagic, 4);
    write_pod(out, kVersion);
    write_pod(out, meta.episode);
    write_pod(out, meta.train_steps);
    write_pod(out, static_cast<uint32_t>(tensors.size()));
    for (const auto& nt : tensors) {
        write_pod(out, static_cast<uint32_t>(nt.name.size()));
        out.write(nt.name.data(), static_cast<std::streamsize>(nt.name.size()));
        write_pod(out, static_cast<uint32_t>(nt.tensor->value.rows()));
        write_pod(out, static_cast<uint32_t>(nt.tensor->value.cols()));
        out.write(reinterpret_cast<const char*>(nt.tensor->value.data()),
                  static_cast<std::streamsize>(sizeof(float) * static_cast<size_t>(nt.tensor->value.size())));
    }
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

CheckpointMeta load_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    uint32_t version = 0;
    read_pod(in, version);
    if (version != kVersion) throw std::runtime_error("checkpoint: unsupported version");
    CheckpointMeta meta;
    read_pod(in, meta.episode);
    read_pod(in, meta.train_steps);
    uint32_t count = 0;
    read_pod(in, count);
    if (count != tensors.size())
        throw std::runtime_error("checkpoint: tensor count mismatch in " + path);
    for (const auto& nt : tensors) {
        uint32_t name_len = 0;
        read_pod(in, name_len);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        if (name != nt.name)
            throw std::runtime_error("checkpoint: expected tensor '" + nt.name + "', found '" + name + "'");
        uint32_t rows = 0, cols = 0;
        read_pod(in, rows);
        read_pod(in, cols);
        if (rows != nt.tensor->value.rows() || cols != nt.tensor->value.cols())
            throw std::runtime_error("checkpoint: shape mismatch for '" + name + "'");
        in.read(reinterpret_cast<char*>(nt.tensor->value.data()),
                static_cast<std::streamsize>(sizeof(float) * static_cast<size_t>(nt.tensor->value.size())));
    }
    if (!in) throw std::runtime_error("checkpoint: short read in " + path);
    return meta;
}

} // namespace uavsim::learncore
