#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specmatch/kernels.hpp"
#include "specmatch/rng.hpp"
#include "specmatch/tensor.hpp"

namespace specmatch {

enum class LayerKind : std::uint32_t {
    Conv = 0,
    BatchNorm = 1,
    LeakyReLU = 2,
    MaxPool = 3,
    Flatten = 4,
    Dense = 5,
};

struct LayerSpec {
    LayerKind kind = LayerKind::Conv;
    int filters = 0;   // conv
    int kernel = 0;    // conv / maxpool
    int stride = 1;    // conv / maxpool
    int units = 0;     // dense
    double slope = 0.01;  // leakyrelu

    static LayerSpec conv(int m, int n, int stride = 1) {
        return {LayerKind::Conv, m, n, stride, 0, 0.0};
    }
    static LayerSpec batchnorm() { return {LayerKind::BatchNorm, 0, 0, 1, 0, 0.0}; }
    static LayerSpec leakyrelu(double slope = 0.01) {
        return {LayerKind::LeakyReLU, 0, 0, 1, 0, slope};
    }
    static LayerSpec maxpool(int k, int s) { return {LayerKind::MaxPool, 0, k, s, 0, 0.0}; }
    static LayerSpec flatten() { return {LayerKind::Flatten, 0, 0, 1, 0, 0.0}; }
    static LayerSpec dense(int units) { return {LayerKind::Dense, 0, 0, 1, units, 0.0}; }

    void validate() const {
        switch (kind) {
            case LayerKind::Conv:
                if (filters < 1 || kernel < 1 || stride < 1)
                    throw ShapeMismatch("conv spec requires filters, kernel, stride >= 1");
                break;
            case LayerKind::MaxPool:
                if (kernel < 1 || stride < 1)
                    throw ShapeMismatch("maxpool spec requires kernel, stride >= 1");
                break;
            case LayerKind::Dense:
                if (units < 1) throw ShapeMismatch("dense spec requires units >= 1");
                break;
            case LayerKind::LeakyReLU:
                if (!(slope > 0.0 && slope < 1.0))
                    throw ShapeMismatch("leakyrelu slope must be in (0,1)");
                break;
            default:
                break;
        }
    }
    bool operator==(const LayerSpec&) const = default;
};

// One conv block as used throughout: Conv -> BN -> LeakyReLU -> MaxPool.
inline void append_block(std::vector<LayerSpec>& specs, int filters, int kernel,
                         int pool_k = 2, int pool_s = 2, double slope = 0.01) {
    specs.push_back(LayerSpec::conv(filters, kernel));
    specs.push_back(LayerSpec::batchnorm());
    specs.push_back(LayerSpec::leakyrelu(slope));
    specs.push_back(LayerSpec::maxpool(pool_k, pool_s));
}

// Default twin: six blocks, feature maps halved every second block, then
// flatten. With valid convolutions and pool(2,2), input length 1024 ends at
// 8 channels x 11 -> 88 features.
inline std::vector<LayerSpec> default_twin_specs() {
    std::vector<LayerSpec> specs;
    const int filters[6] = {32, 32, 16, 16, 8, 8};
    const int kernels[6] = {9, 9, 7, 7, 5, 5};
    for (int i = 0; i < 6; ++i) append_block(specs, filters[i], kernels[i]);
    specs.push_back(LayerSpec::flatten());
    return specs;
}

// Per-layer output shape without the batch dim: {C, L} or {F}.
// Throws ShapeMismatch when a window no longer fits.
inline std::vector<std::vector<int>> infer_shapes(const std::vector<LayerSpec>& specs,
                                                  std::vector<int> input) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur = std::move(input);
    for (const auto& s : specs) {
        s.validate();
        switch (s.kind) {
            case LayerKind::Conv:
                if (cur.size() != 2) throw ShapeMismatch("conv needs (C,L) input");
                if (s.kernel > cur[1]) throw ShapeMismatch("conv kernel exceeds length");
                cur = {s.filters, kernels::conv_out_len(cur[1], s.kernel, s.stride)};
                break;
            case LayerKind::MaxPool:
                if (cur.size() != 2) throw ShapeMismatch("maxpool needs (C,L) input");
                if (s.kernel > cur[1]) throw ShapeMismatch("pool kernel exceeds length");
                cur = {cur[0], kernels::conv_out_len(cur[1], s.kernel, s.stride)};
                break;
            case LayerKind::BatchNorm:
            case LayerKind::LeakyReLU:
                break;
            case LayerKind::Flatten: {
                int f = 1;
                for (int v : cur) f *= v;
                cur = {f};
                break;
            }
            case LayerKind::Dense:
                if (cur.size() != 1) throw ShapeMismatch("dense needs flattened input");
                cur = {s.units};
                break;
        }
        out.push_back(cur);
    }
    return out;
}

inline int infer_feature_dim(const std::vector<LayerSpec>& specs, int in_channels,
                             int in_length) {
    auto shapes = infer_shapes(specs, {in_channels, in_length});
    const auto& last = shapes.back();
    int d = 1;
    for (int v : last) d *= v;
    return d;
}

template <typename T>
struct ParamRef {
    std::vector<T>* value;
    std::vector<T>* grad;  // null for non-trainable state (running stats)
};

template <typename T>
struct Layer {
    LayerSpec spec;
    std::vector<T> w, b;
    std::vector<T> gw, gb;
    std::vector<T> run_mean, run_var;  // batchnorm

    // train-mode forward cache
    Tensor<T> in;
    std::vector<T> mean, var, xhat;
    std::vector<std::int32_t> argmax;
    int cached_out_len = 0;
};

// A feed-forward stack over the fixed layer set. Forward in eval mode is
// const and cache-free; train mode caches activations for backward.
template <typename T>
class Network {
public:
    static constexpr T kBnEps = static_cast<T>(1e-5);
    static constexpr T kBnMomentum = static_cast<T>(0.9);

    Network() = default;
    Network(std::vector<LayerSpec> specs, int in_channels, int in_length)
        : in_channels_(in_channels), in_length_(in_length) {
        for (const auto& s : specs) s.validate();
        shapes_ = infer_shapes(specs, {in_channels, in_length});
        std::vector<int> cur = {in_channels, in_length};
        for (std::size_t li = 0; li < specs.size(); ++li) {
            Layer<T> layer;
            layer.spec = specs[li];
            allocate(layer, cur);
            cur = shapes_[li];
            layers_.push_back(std::move(layer));
        }
    }

    void init_xavier(std::uint64_t seed) {
        Rng rng(seed);
        std::vector<int> cur = {in_channels_, in_length_};
        for (std::size_t li = 0; li < layers_.size(); ++li) {
            auto& layer = layers_[li];
            if (layer.spec.kind == LayerKind::Conv) {
                int fan_in = cur[0] * layer.spec.kernel;
                int fan_out = layer.spec.filters * layer.spec.kernel;
                T a = static_cast<T>(std::sqrt(6.0 / (fan_in + fan_out)));
                for (auto& v : layer.w) v = static_cast<T>(rng.uniform(-a, a));
            } else if (layer.spec.kind == LayerKind::Dense) {
                int fan_in = flat_dim(cur);
                int fan_out = layer.spec.units;
                T a = static_cast<T>(std::sqrt(6.0 / (fan_in + fan_out)));
                for (auto& v : layer.w) v = static_cast<T>(rng.uniform(-a, a));
            }
            cur = shapes_[li];
        }
    }

    Tensor<T> forward(const Tensor<T>& x, bool train) {
        if (train) has_cache_ = true;
        return run_forward(x, train, /*cache=*/train);
    }

    // Eval-mode forward; const, never touches running statistics or caches.
    Tensor<T> infer(const Tensor<T>& x) const {
        return const_cast<Network*>(this)->run_forward_const(x);
    }

    Tensor<T> backward(const Tensor<T>& gy) {
        if (!has_cache_) throw NoForwardCache();
        Tensor<T> g = gy;
        for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
            g = layer_backward(*it, g);
        return g;
    }

    std::vector<ParamRef<T>> params() {
        std::vector<ParamRef<T>> out;
        for (auto& layer : layers_) {
            if (!layer.w.empty()) out.push_back({&layer.w, &layer.gw});
            if (!layer.b.empty()) out.push_back({&layer.b, &layer.gb});
        }
        return out;
    }

    // All persistent state in declaration order, running stats included.
    std::vector<const std::vector<T>*> state_blobs() const {
        std::vector<const std::vector<T>*> out;
        for (const auto& layer : layers_) {
            if (!layer.w.empty()) out.push_back(&layer.w);
            if (!layer.b.empty()) out.push_back(&layer.b);
            if (layer.spec.kind == LayerKind::BatchNorm) {
                out.push_back(&layer.run_mean);
                out.push_back(&layer.run_var);
            }
        }
        return out;
    }
    std::vector<std::vector<T>*> state_blobs() {
        std::vector<std::vector<T>*> out;
        for (auto& layer : layers_) {
            if (!layer.w.empty()) out.push_back(&layer.w);
            if (!layer.b.empty()) out.push_back(&layer.b);
            if (layer.spec.kind == LayerKind::BatchNorm) {
                out.push_back(&layer.run_mean);
                out.push_back(&layer.run_var);
            }
        }
        return out;
    }

    std::vector<LayerSpec> specs() const {
        std::vector<LayerSpec> out;
        for (const auto& layer : layers_) out.push_back(layer.spec);
        return out;
    }
    int in_channels() const { return in_channels_; }
    int in_length() const { return in_length_; }
    int out_dim() const { return flat_dim(shapes_.back()); }
    const std::vector<std::vector<int>>& shapes() const { return shapes_; }

private:
    static int flat_dim(const std::vector<int>& s) {
        int d = 1;
        for (int v : s) d *= v;
        return d;
    }

    void allocate(Layer<T>& layer, const std::vector<int>& in_shape) {
        switch (layer.spec.kind) {
            case LayerKind::Conv: {
                int C = in_shape[0];
                layer.w.assign(static_cast<std::size_t>(layer.spec.filters) * C *
                                   layer.spec.kernel,
                               T{});
                layer.b.assign(layer.spec.filters, T{});
                layer.gw.assign(layer.w.size(), T{});
                layer.gb.assign(layer.b.size(), T{});
                break;
            }
            case LayerKind::BatchNorm: {
                int C = in_shape[0];
                layer.w.assign(C, T(1));  // gamma
                layer.b.assign(C, T{});   // beta
                layer.gw.assign(C, T{});
                layer.gb.assign(C, T{});
                layer.run_mean.assign(C, T{});
                layer.run_var.assign(C, T(1));
                break;
            }
            case LayerKind::Dense: {
                int F = flat_dim(in_shape);
                layer.w.assign(static_cast<std::size_t>(F) * layer.spec.units, T{});
                layer.b.assign(layer.spec.units, T{});
                layer.gw.assign(layer.w.size(), T{});
                layer.gb.assign(layer.b.size(), T{});
                break;
            }
            default:
                break;
        }
    }

    Tensor<T> run_forward(const Tensor<T>& x, bool train, bool cache) {
        Tensor<T> cur = x;
        if (cur.rank() == 3 &&
            (cur.shape[1] != in_channels_ || cur.shape[2] != in_length_))
            throw ShapeMismatch("network input shape");
        for (auto& layer : layers_) cur = layer_forward(layer, cur, train, cache);
        return cur;
    }

    Tensor<T> run_forward_const(const Tensor<T>& x) {
        Tensor<T> cur = x;
        if (cur.rank() == 3 &&
            (cur.shape[1] != in_channels_ || cur.shape[2] != in_length_))
            throw ShapeMismatch("network input shape");
        for (auto& layer : layers_) cur = layer_forward(layer, cur, false, false);
        return cur;
    }

    Tensor<T> layer_forward(Layer<T>& layer, const Tensor<T>& x, bool train, bool cache) {
        switch (layer.spec.kind) {
            case LayerKind::Conv: {
                int B = x.shape[0], C = x.shape[1], L = x.shape[2];
                if (layer.spec.kernel > L) throw ShapeMismatch("conv kernel exceeds length");
                int Lo = kernels::conv_out_len(L, layer.spec.kernel, layer.spec.stride);
                Tensor<T> y({B, layer.spec.filters, Lo});
                kernels::conv1d_forward(x.data.data(), B, C, L, layer.w.data(),
                                        layer.b.data(), layer.spec.filters,
                                        layer.spec.kernel, layer.spec.stride,
                                        y.data.data());
                if (cache) layer.in = x;
                return y;
            }
            case LayerKind::BatchNorm: {
                int B = x.shape[0], C = x.shape[1], L = x.shape[2];
                Tensor<T> y(x.shape);
                if (train) {
                    if (static_cast<std::size_t>(B) * L < 2) throw DegenerateBatch();
                    layer.mean.assign(C, T{});
                    layer.var.assign(C, T{});
                    layer.xhat.assign(x.size(), T{});
                    kernels::batchnorm_forward_train(
                        x.data.data(), B, C, L, layer.w.data(), layer.b.data(), kBnEps,
                        kBnMomentum, y.data.data(), layer.mean.data(), layer.var.data(),
                        layer.xhat.data(), layer.run_mean.data(), layer.run_var.data());
                    if (cache) layer.in = x;
                } else {
                    kernels::batchnorm_forward_eval(x.data.data(), B, C, L, layer.w.data(),
                                                    layer.b.data(), kBnEps,
                                                    layer.run_mean.data(),
                                                    layer.run_var.data(), y.data.data());
                }
                return y;
            }
            case LayerKind::LeakyReLU: {
                Tensor<T> y(x.shape);
                kernels::leakyrelu_forward(x.data.data(), x.size(),
                                           static_cast<T>(layer.spec.slope),
                                           y.data.data());
                if (cache) layer.in = x;
                return y;
            }
            case LayerKind::MaxPool: {
                int B = x.shape[0], C = x.shape[1], L = x.shape[2];
                if (layer.spec.kernel > L) throw ShapeMismatch("pool kernel exceeds length");
                int Lo = kernels::conv_out_len(L, layer.spec.kernel, layer.spec.stride);
                Tensor<T> y({B, C, Lo});
                std::vector<std::int32_t> argmax(y.size());
                kernels::maxpool_forward(x.data.data(), B, C, L, layer.spec.kernel,
                                         layer.spec.stride, y.data.data(), argmax.data());
                if (cache) {
                    layer.in = x;
                    layer.argmax = std::move(argmax);
                    layer.cached_out_len = Lo;
                }
                return y;
            }
            case LayerKind::Flatten: {
                Tensor<T> y({x.shape[0], flat_dim({x.shape.begin() + 1, x.shape.end()})},
                            x.data);
                if (cache) layer.in = x;
                return y;
            }
            case LayerKind::Dense: {
                int B = x.shape[0], F = x.shape[1];
                Tensor<T> y({B, layer.spec.units});
                kernels::dense_forward(x.data.data(), B, F, layer.w.data(),
                                       layer.b.data(), layer.spec.units, y.data.data());
                if (cache) layer.in = x;
                return y;
            }
        }
        throw ShapeMismatch("unknown layer kind");
    }

    Tensor<T> layer_backward(Layer<T>& layer, const Tensor<T>& gy) {
        switch (layer.spec.kind) {
            case LayerKind::Conv: {
                const auto& x = layer.in;
                int B = x.shape[0], C = x.shape[1], L = x.shape[2];
                Tensor<T> gx(x.shape);
                kernels::conv1d_backward(x.data.data(), layer.w.data(), gy.data.data(), B,
                                         C, L, layer.spec.filters, layer.spec.kernel,
                                         layer.spec.stride, gx.data.data(),
                                         layer.gw.data(), layer.gb.data());
                return gx;
            }
            case LayerKind::BatchNorm: {
                const auto& x = layer.in;
                int B = x.shape[0], C = x.shape[1], L = x.shape[2];
                Tensor<T> gx(x.shape);
                kernels::batchnorm_backward(gy.data.data(), layer.xhat.data(),
                                            layer.mean.data(), layer.var.data(),
                                            layer.w.data(), kBnEps, B, C, L,
                                            gx.data.data(), layer.gw.data(),
                                            layer.gb.data());
                return gx;
            }
            case LayerKind::LeakyReLU: {
                Tensor<T> gx(layer.in.shape);
                kernels::leakyrelu_backward(layer.in.data.data(), gy.data.data(),
                                            gy.size(), static_cast<T>(layer.spec.slope),
                                            gx.data.data());
                return gx;
            }
            case LayerKind::MaxPool: {
                const auto& x = layer.in;
                int B = x.shape[0], C = x.shape[1], L = x.shape[2];
                Tensor<T> gx(x.shape);
                kernels::maxpool_backward(layer.argmax.data(), gy.data.data(), B, C, L,
                                          layer.cached_out_len, gx.data.data());
                return gx;
            }
            case LayerKind::Flatten: {
                return Tensor<T>(layer.in.shape, gy.data);
            }
            case LayerKind::Dense: {
                const auto& x = layer.in;
                int B = x.shape[0], F = x.shape[1];
                Tensor<T> gx(x.shape);
                kernels::dense_backward(x.data.data(), layer.w.data(), gy.data.data(), B,
                                        F, layer.spec.units, gx.data.data(),
                                        layer.gw.data(), layer.gb.data());
                return gx;
            }
        }
        throw ShapeMismatch("unknown layer kind");
    }

    int in_channels_ = 1;
    int in_length_ = 0;
    std::vector<Layer<T>> layers_;
    std::vector<std::vector<int>> shapes_;
    bool has_cache_ = false;
};

}  // namespace specmatch
