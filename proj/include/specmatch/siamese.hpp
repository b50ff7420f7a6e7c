#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "specmatch/model.hpp"
#include "specmatch/spectrum.hpp"

namespace specmatch {

template <typename T>
inline T logistic(T x) {
    return x >= T{} ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}

// Binary cross-entropy evaluated from the pre-sigmoid value:
// softplus(logit) - y * logit.
template <typename T>
inline T bce_from_logit(T logit, T label) {
    T sp = std::max(logit, T{}) + std::log1p(std::exp(-std::abs(logit)));
    return sp - label * logit;
}

template <typename T>
inline T bce_loss(T s, T label) {
    return -(label * std::log(s) + (T(1) - label) * std::log(T(1) - s));
}

// Weight-shared twin network plus the learned weighted-L1 metric:
// s(a, b) = logistic(w . |f(a) - f(b)| + bias). With the bias disabled the
// model reduces to the plain weighted-L1 logistic form.
template <typename T>
class SiameseModel {
public:
    SiameseModel() = default;
    SiameseModel(std::vector<LayerSpec> twin_specs, int in_length, bool with_bias = true)
        : twin_(std::move(twin_specs), 1, in_length), bias_enabled_(with_bias) {
        metric_w_.assign(twin_.out_dim(), T{});
        g_metric_w_.assign(twin_.out_dim(), T{});
        metric_b_.assign(1, T{});
        g_metric_b_.assign(1, T{});
    }

    void init_xavier(std::uint64_t seed) {
        twin_.init_xavier(seed);
        Rng rng(mix_seed(seed, 0x5151));
        T a = static_cast<T>(std::sqrt(6.0 / (twin_.out_dim() + 1)));
        for (auto& v : metric_w_) v = static_cast<T>(rng.uniform(-a, a));
        metric_b_[0] = T{};
    }

    int feature_dim() const { return twin_.out_dim(); }
    int in_length() const { return twin_.in_length(); }
    Network<T>& twin() { return twin_; }
    const Network<T>& twin() const { return twin_; }
    std::vector<T>& metric_w() { return metric_w_; }
    const std::vector<T>& metric_w() const { return metric_w_; }
    T& metric_b() { return metric_b_[0]; }
    T metric_b() const { return metric_b_[0]; }
    bool bias_enabled() const { return bias_enabled_; }
    std::uint64_t embed_calls() const { return embed_calls_; }

    std::vector<T> embed(const std::vector<float>& intensities) const {
        if (static_cast<int>(intensities.size()) != twin_.in_length())
            throw ShapeMismatch("spectrum length vs architecture input length");
        Tensor<T> x({1, 1, twin_.in_length()});
        for (std::size_t i = 0; i < intensities.size(); ++i)
            x.data[i] = static_cast<T>(intensities[i]);
        ++embed_calls_;
        Tensor<T> f = twin_.infer(x);
        return f.data;
    }
    std::vector<T> embed(const Spectrum& s) const { return embed(s.intensities); }

    // Similarity from precomputed features; the matcher path.
    T similarity_from_features(const std::vector<T>& fa, const std::vector<T>& fb) const {
        return logistic(logit_from_features(fa, fb));
    }

    T logit_from_features(const std::vector<T>& fa, const std::vector<T>& fb) const {
        if (fa.size() != metric_w_.size() || fb.size() != metric_w_.size())
            throw ShapeMismatch("feature dim vs metric weights");
        T acc = bias_enabled_ ? metric_b_[0] : T{};
        for (std::size_t i = 0; i < fa.size(); ++i)
            acc += metric_w_[i] * std::abs(fa[i] - fb[i]);
        return acc;
    }

    T similarity(const Spectrum& a, const Spectrum& b) const {
        return similarity_from_features(embed(a), embed(b));
    }

    // One training step over P pairs: both branch mini-batches are stacked
    // into a single forward batch so batch-norm sees identical statistics on
    // both sides. Fills all gradients, returns mean BCE.
    T train_step(const std::vector<const std::vector<float>*>& side_a,
                 const std::vector<const std::vector<float>*>& side_b,
                 const std::vector<T>& labels) {
        const int P = static_cast<int>(labels.size());
        const int L = twin_.in_length();
        Tensor<T> x({2 * P, 1, L});
        for (int p = 0; p < P; ++p)
            for (int i = 0; i < L; ++i) {
                x.at3(p, 0, i) = static_cast<T>((*side_a[p])[i]);
                x.at3(P + p, 0, i) = static_cast<T>((*side_b[p])[i]);
            }
        Tensor<T> feat = twin_.forward(x, /*train=*/true);
        const int D = feat.shape[1];

        T loss = T{};
        Tensor<T> gfeat({2 * P, D});
        g_metric_w_.assign(D, T{});
        g_metric_b_[0] = T{};
        for (int p = 0; p < P; ++p) {
            T lg = bias_enabled_ ? metric_b_[0] : T{};
            for (int d = 0; d < D; ++d)
                lg += metric_w_[d] * std::abs(feat.at2(p, d) - feat.at2(P + p, d));
            loss += bce_from_logit(lg, labels[p]);
            T dlogit = (logistic(lg) - labels[p]) / static_cast<T>(P);
            if (bias_enabled_) g_metric_b_[0] += dlogit;
            for (int d = 0; d < D; ++d) {
                T diff = feat.at2(p, d) - feat.at2(P + p, d);
                g_metric_w_[d] += dlogit * std::abs(diff);
                T sgn = diff > T{} ? T(1) : (diff < T{} ? T(-1) : T{});
                T g = dlogit * metric_w_[d] * sgn;
                gfeat.at2(p, d) = g;
                gfeat.at2(P + p, d) = -g;
            }
        }
        twin_.backward(gfeat);
        return loss / static_cast<T>(P);
    }

    // Mean BCE over pairs without touching any state (eval-mode forward).
    T eval_loss(const std::vector<const std::vector<float>*>& side_a,
                const std::vector<const std::vector<float>*>& side_b,
                const std::vector<T>& labels) const {
        T loss = T{};
        for (std::size_t p = 0; p < labels.size(); ++p) {
            auto fa = embed(*side_a[p]);
            auto fb = embed(*side_b[p]);
            loss += bce_from_logit(logit_from_features(fa, fb), labels[p]);
        }
        return loss / static_cast<T>(labels.size());
    }

    std::vector<ParamRef<T>> params() {
        auto out = twin_.params();
        out.push_back({&metric_w_, &g_metric_w_});
        if (bias_enabled_) out.push_back({&metric_b_, &g_metric_b_});
        return out;
    }

    // Persistent blobs in declaration order: twin state, metric w, metric b.
    std::vector<const std::vector<T>*> state_blobs() const {
        auto out = twin_.state_blobs();
        out.push_back(&metric_w_);
        out.push_back(&metric_b_);
        return out;
    }
    std::vector<std::vector<T>*> state_blobs() {
        auto out = twin_.state_blobs();
        out.push_back(&metric_w_);
        out.push_back(&metric_b_);
        return out;
    }

private:
    Network<T> twin_;
    std::vector<T> metric_w_;
    std::vector<T> metric_b_{T{}};  // scalar bias, length-1 for optimizer plumbing
    bool bias_enabled_ = true;
    std::vector<T> g_metric_w_;
    std::vector<T> g_metric_b_{T{}};
    mutable std::uint64_t embed_calls_ = 0;
};

template <typename T>
inline std::vector<T> softmax(const std::vector<T>& logits) {
    T mx = logits[0];
    for (T v : logits) mx = std::max(mx, v);
    std::vector<T> p(logits.size());
    T sum = T{};
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

// The same conv stack with a dense softmax head over K trained classes.
template <typename T>
class ClassifierModel {
public:
    ClassifierModel() = default;
    ClassifierModel(std::vector<LayerSpec> twin_specs, int in_length, int n_classes)
        : n_classes_(n_classes) {
        twin_specs.push_back(LayerSpec::dense(n_classes));
        net_ = Network<T>(std::move(twin_specs), 1, in_length);
    }

    void init_xavier(std::uint64_t seed) { net_.init_xavier(seed); }
    int n_classes() const { return n_classes_; }
    Network<T>& net() { return net_; }
    const Network<T>& net() const { return net_; }

    std::vector<T> forward_probs(const std::vector<float>& intensities) const {
        if (static_cast<int>(intensities.size()) != net_.in_length())
            throw ShapeMismatch("spectrum length vs architecture input length");
        Tensor<T> x({1, 1, net_.in_length()});
        for (std::size_t i = 0; i < intensities.size(); ++i)
            x.data[i] = static_cast<T>(intensities[i]);
        Tensor<T> logits = net_.infer(x);
        return softmax(logits.data);
    }

    int predict(const std::vector<float>& intensities) const {
        auto p = forward_probs(intensities);
        int best = 0;
        for (std::size_t i = 1; i < p.size(); ++i)
            if (p[i] > p[best]) best = static_cast<int>(i);
        return best;
    }

    // One cross-entropy step over a batch; labels are dense head indices.
    T train_step(const std::vector<const std::vector<float>*>& batch,
                 const std::vector<int>& labels) {
        const int B = static_cast<int>(batch.size());
        const int L = net_.in_length();
        Tensor<T> x({B, 1, L});
        for (int b = 0; b < B; ++b)
            for (int i = 0; i < L; ++i) x.at3(b, 0, i) = static_cast<T>((*batch[b])[i]);
        Tensor<T> logits = net_.forward(x, /*train=*/true);
        const int K = logits.shape[1];
        Tensor<T> glogits({B, K});
        T loss = T{};
        for (int b = 0; b < B; ++b) {
            std::vector<T> row(logits.data.begin() + static_cast<std::size_t>(b) * K,
                               logits.data.begin() + static_cast<std::size_t>(b + 1) * K);
            auto p = softmax(row);
            loss -= std::log(std::max(p[labels[b]], static_cast<T>(1e-30)));
            for (int k = 0; k < K; ++k)
                glogits.at2(b, k) =
                    (p[k] - (k == labels[b] ? T(1) : T{})) / static_cast<T>(B);
        }
        net_.backward(glogits);
        return loss / static_cast<T>(B);
    }

    std::vector<ParamRef<T>> params() { return net_.params(); }
    std::vector<const std::vector<T>*> state_blobs() const { return net_.state_blobs(); }
    std::vector<std::vector<T>*> state_blobs() { return net_.state_blobs(); }

private:
    Network<T> net_;
    int n_classes_ = 0;
};

}  // namespace specmatch
