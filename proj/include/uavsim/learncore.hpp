#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavsim::learncore {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// A parameter block: value plus a same-shape gradient accumulator.
template <typename S>
struct Tensor {
    Mat<S> value;
    Mat<S> grad;

    Tensor() = default;
    Tensor(Eigen::Index rows, Eigen::Index cols)
        : value(Mat<S>::Zero(rows, cols)), grad(Mat<S>::Zero(rows, cols)) {}

    void zero_grad() { grad.setZero(); }
};

// ---------------------------------------------------------------------------
// Initialization

inline void fanin_uniform_init(Mat<float>& m, std::mt19937_64& rng) {
    const float bound = 1.0f / std::sqrt(static_cast<float>(m.cols()));
    std::uniform_real_distribution<float> dist(-bound, bound);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
}

// Orthogonal init via QR of a Gaussian matrix, sign-fixed by diag(R).
inline void orthogonal_init(Mat<float>& m, std::mt19937_64& rng) {
    std::normal_distribution<float> dist(0.0f, 1.0f);
    Mat<float> g(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < g.cols(); ++j)
        for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = dist(rng);
    Eigen::HouseholderQR<Mat<float>> qr(g);
    Mat<float> q = qr.householderQ() * Mat<float>::Identity(g.rows(), g.cols());
    Mat<float> r = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < std::min(r.rows(), r.cols()); ++j)
        if (r(j, j) < 0.0f) q.col(j) = -q.col(j);
    m = q;
}

// ---------------------------------------------------------------------------
// Layer ops.  Inputs are column-batched: X is [in_dim x batch].

template <typename S>
Mat<S> dense_forward(const Tensor<S>& w, const Tensor<S>& b, const Mat<S>& x) {
    if (w.value.cols() != x.rows()) throw std::invalid_argument("dense_forward: shape mismatch");
    return (w.value * x).colwise() + Vec<S>(b.value.col(0));
}

// Accumulates into w.grad/b.grad; returns dX when requested.
template <typename S>
void dense_backward(Tensor<S>& w, Tensor<S>& b, const Mat<S>& x, const Mat<S>& dy,
                    Mat<S>* dx = nullptr) {
    w.grad.noalias() += dy * x.transpose();
    b.grad.col(0).noalias() += dy.rowwise().sum();
    if (dx) dx->noalias() = w.value.transpose() * dy;
}

template <typename S>
Mat<S> relu_forward(const Mat<S>& x) {
    return x.cwiseMax(S(0));
}

// y is the forward output (sign information is identical to the input's).
template <typename S>
Mat<S> relu_backward(const Mat<S>& y, const Mat<S>& dy) {
    return (y.array() > S(0)).template cast<S>() * dy.array();
}

template <typename S>
Mat<S> elu_forward(const Mat<S>& x) {
    return x.unaryExpr([](S v) { return v > S(0) ? v : S(std::expm1(static_cast<double>(v))); });
}

template <typename S>
Mat<S> elu_backward(const Mat<S>& x, const Mat<S>& dy) {
    Mat<S> dx = dy;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            if (x(i, j) <= S(0)) dx(i, j) *= S(std::exp(static_cast<double>(x(i, j))));
    return dx;
}

template <typename S>
Mat<S> abs_forward(const Mat<S>& x) {
    return x.cwiseAbs();
}

// Subgradient at 0 is 0.
template <typename S>
Mat<S> abs_backward(const Mat<S>& x, const Mat<S>& dy) {
    return x.unaryExpr([](S v) { return v > S(0) ? S(1) : (v < S(0) ? S(-1) : S(0)); })
        .cwiseProduct(dy);
}

// ---------------------------------------------------------------------------
// Sum pooling over an HxH map with MxM non-overlapping windows, zero-padded on
// the ragged edge: [H^2 x B] -> [P^2 x B], P = ceil(H/M).

inline int pooled_side(int h, int m) { return (h + m - 1) / m; }

template <typename S>
Mat<S> sum_pool2d_forward(const Mat<S>& x, int h, int m) {
    if (x.rows() != static_cast<Eigen::Index>(h) * h)
        throw std::invalid_argument("sum_pool2d: input is not an HxH map");
    const int p = pooled_side(h, m);
    Mat<S> y = Mat<S>::Zero(static_cast<Eigen::Index>(p) * p, x.cols());
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < h; ++c)
            y.row((r / m) * p + (c / m)) += x.row(r * h + c);
    return y;
}

template <typename S>
Mat<S> sum_pool2d_backward(const Mat<S>& dy, int h, int m) {
    const int p = pooled_side(h, m);
    Mat<S> dx = Mat<S>::Zero(static_cast<Eigen::Index>(h) * h, dy.cols());
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < h; ++c)
            dx.row(r * h + c) = dy.row((r / m) * p + (c / m));
    return dx;
}

// ---------------------------------------------------------------------------
// GRU cell.  z = sig(Wz x + Uz h + bz), r = sig(Wr x + Ur h + br),
// n = tanh(Wn x + r.(Un h) + bn), h' = (1-z).n + z.h.

template <typename S>
struct GruParams {
    Tensor<S> wz, uz, bz, wr, ur, br, wn, un, bn;

    GruParams() = default;
    GruParams(int hidden, int input)
        : wz(hidden, input), uz(hidden, hidden), bz(hidden, 1),
          wr(hidden, input), ur(hidden, hidden), br(hidden, 1),
          wn(hidden, input), un(hidden, hidden), bn(hidden, 1) {}

    std::vector<Tensor<S>*> tensors() { return {&wz, &uz, &bz, &wr, &ur, &br, &wn, &un, &bn}; }
};

template <typename S>
struct GruCache {
    Mat<S> x, h_prev, z, r, n, uh;
};

template <typename S>
Mat<S> sigmoid(const Mat<S>& x) {
    return x.unaryExpr([](S v) { return S(1) / (S(1) + S(std::exp(-static_cast<double>(v)))); });
}

template <typename S>
Mat<S> gru_forward(const GruParams<S>& p, const Mat<S>& x, const Mat<S>& h_prev,
                   GruCache<S>* cache = nullptr) {
    Mat<S> z = sigmoid<S>((p.wz.value * x + p.uz.value * h_prev).colwise() + Vec<S>(p.bz.value.col(0)));
    Mat<S> r = sigmoid<S>((p.wr.value * x + p.ur.value * h_prev).colwise() + Vec<S>(p.br.value.col(0)));
    Mat<S> uh = p.un.value * h_prev;
    Mat<S> n = ((p.wn.value * x + r.cwiseProduct(uh)).colwise() + Vec<S>(p.bn.value.col(0)))
                   .array()
                   .unaryExpr([](S v) { return S(std::tanh(static_cast<double>(v))); });
    Mat<S> h = (Mat<S>::Ones(z.rows(), z.cols()) - z).cwiseProduct(n) + z.cwiseProduct(h_prev);
    if (cache) {
        cache->x = x;
        cache->h_prev = h_prev;
        cache->z = z;
        cache->r = r;
        cache->n = n;
        cache->uh = uh;
    }
    return h;
}

// Accumulates parameter grads; writes grads w.r.t. x and h_prev.
template <typename S>
void gru_backward(GruParams<S>& p, const GruCache<S>& c, const Mat<S>& dh, Mat<S>& dx,
                  Mat<S>& dh_prev) {
    const Mat<S> ones = Mat<S>::Ones(dh.rows(), dh.cols());
    Mat<S> dz = dh.cwiseProduct(c.h_prev - c.n);
    Mat<S> dn = dh.cwiseProduct(ones - c.z);
    dh_prev = dh.cwiseProduct(c.z);

    Mat<S> dan = dn.cwiseProduct(ones - c.n.cwiseProduct(c.n));
    p.wn.grad.noalias() += dan * c.x.transpose();
    p.bn.grad.col(0).noalias() += dan.rowwise().sum();
    dx.noalias() = p.wn.value.transpose() * dan;
    Mat<S> dr = dan.cwiseProduct(c.uh);
    Mat<S> duh = dan.cwiseProduct(c.r);
    p.un.grad.noalias() += duh * c.h_prev.transpose();
    dh_prev.noalias() += p.un.value.transpose() * duh;

    Mat<S> dar = dr.cwiseProduct(c.r).cwiseProduct(ones - c.r);
    p.wr.grad.noalias() += dar * c.x.transpose();
    p.ur.grad.noalias() += dar * c.h_prev.transpose();
    p.br.grad.col(0).noalias() += dar.rowwise().sum();
    dx.noalias() += p.wr.value.transpose() * dar;
    dh_prev.noalias() += p.ur.value.transpose() * dar;

    Mat<S> daz = dz.cwiseProduct(c.z).cwiseProduct(ones - c.z);
    p.wz.grad.noalias() += daz * c.x.transpose();
    p.uz.grad.noalias() += daz * c.h_prev.transpose();
    p.bz.grad.col(0).noalias() += daz.rowwise().sum();
    dx.noalias() += p.wz.value.transpose() * daz;
    dh_prev.noalias() += p.uz.value.transpose() * daz;
}

// ---------------------------------------------------------------------------
// First-order adaptive-moment optimizer with bias correction.

struct AdamConfig {
    float lr = 5e-5f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;
};

class Adam {
  public:
    Adam() = default;
    explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

    void step(const std::vector<Tensor<float>*>& params) {
        if (m_.empty()) {
            for (auto* t : params) {
                m_.emplace_back(Mat<float>::Zero(t->value.rows(), t->value.cols()));
                v_.emplace_back(Mat<float>::Zero(t->value.rows(), t->value.cols()));
            }
        }
        ++t_;
        const float bc1 = 1.0f - std::pow(cfg_.beta1, static_cast<float>(t_));
        const float bc2 = 1.0f - std::pow(cfg_.beta2, static_cast<float>(t_));
        for (size_t i = 0; i < params.size(); ++i) {
            auto& g = params[i]->grad;
            m_[i] = cfg_.beta1 * m_[i] + (1.0f - cfg_.beta1) * g;
            v_[i] = cfg_.beta2 * v_[i].array() + (1.0f - cfg_.beta2) * g.array().square();
            params[i]->value.array() -= cfg_.lr * (m_[i].array() / bc1) /
                                        ((v_[i].array() / bc2).sqrt() + cfg_.eps);
        }
    }

    int64_t steps() const { return t_; }

  private:
    AdamConfig cfg_;
    int64_t t_ = 0;
    std::vector<Mat<float>> m_, v_;
};

// Rescales gradients in place when their global L2 norm exceeds max_norm.
inline void clip_grad_norm(const std::vector<Tensor<float>*>& params, float max_norm) {
    double sq = 0.0;
    for (auto* t : params) sq += static_cast<double>(t->grad.squaredNorm());
    const double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return;
    const float scale = static_cast<float>(max_norm / norm);
    for (auto* t : params) t->grad *= scale;
}

// target <- (1-rate)*target + rate*primary
inline void soft_update(const std::vector<Tensor<float>*>& target,
                        const std::vector<Tensor<float>*>& primary, float rate) {
    if (rate <= 0.0f || rate > 1.0f) throw std::invalid_argument("soft_update: rate out of (0,1]");
    for (size_t i = 0; i < target.size(); ++i)
        target[i]->value = (1.0f - rate) * target[i]->value + rate * primary[i]->value;
}

// ---------------------------------------------------------------------------
// Gradient verification: reverse-mode grads vs central finite differences
// (step 1e-4), in double precision.  Samples up to `samples` entries per
// tensor and returns the maximal relative error.

struct GradCheckResult {
    double max_rel_error = 0.0;
    int checked = 0;
};

GradCheckResult grad_check(const std::vector<Tensor<double>*>& params,
                           const std::function<double()>& forward_loss,
                           const std::function<void()>& backward, int samples_per_tensor,
                           std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Versioned binary checkpoint: named float tensors plus step metadata.

struct NamedTensor {
    std::string name;
    Tensor<float>* tensor;
};

struct CheckpointMeta {
    uint64_t episode = 0;
    uint64_t train_steps = 0;
};

void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors,
                     const CheckpointMeta& meta);
CheckpointMeta load_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors);

} // namespace uavsim::learncore
