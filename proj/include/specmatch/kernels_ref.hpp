#pragma once

// Naive serial reference kernels. Straight transcriptions of the layer
// definitions, no parallelism, no loop reordering. Kept as the oracle for
// the production kernels and as the serial side of the benchmark.

#include <cmath>
#include <cstdint>
#include <vector>

namespace specmatch::ref {

inline int conv_out_len(int L, int K, int stride) { return (L - K) / stride + 1; }

template <typename T>
void conv1d_forward(const T* x, int B, int C, int L, const T* w, const T* bias, int M,
                    int K, int stride, T* y) {
    const int Lo = conv_out_len(L, K, stride);
    for (int b = 0; b < B; ++b)
        for (int m = 0; m < M; ++m)
            for (int i = 0; i < Lo; ++i) {
                T acc = bias[m];
                for (int c = 0; c < C; ++c)
                    for (int k = 0; k < K; ++k)
                        acc += w[(static_cast<std::size_t>(m) * C + c) * K + k] *
                               x[(static_cast<std::size_t>(b) * C + c) * L + i * stride + k];
                y[(static_cast<std::size_t>(b) * M + m) * Lo + i] = acc;
            }
}

template <typename T>
void maxpool_forward(const T* x, int B, int C, int L, int K, int stride, T* y,
                     std::int32_t* argmax) {
    const int Lo = conv_out_len(L, K, stride);
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < C; ++c)
            for (int i = 0; i < Lo; ++i) {
                int best = i * stride;
                for (int k = 1; k < K; ++k)
                    if (x[(static_cast<std::size_t>(b) * C + c) * L + i * stride + k] >
                        x[(static_cast<std::size_t>(b) * C + c) * L + best])
                        best = i * stride + k;
                y[(static_cast<std::size_t>(b) * C + c) * Lo + i] =
                    x[(static_cast<std::size_t>(b) * C + c) * L + best];
                argmax[(static_cast<std::size_t>(b) * C + c) * Lo + i] = best;
            }
}

template <typename T>
void dense_forward(const T* x, int B, int F, const T* w, const T* bias, int U, T* y) {
    for (int b = 0; b < B; ++b)
        for (int u = 0; u < U; ++u) {
            T acc = bias[u];
            for (int f = 0; f < F; ++f)
                acc += x[static_cast<std::size_t>(b) * F + f] *
                       w[static_cast<std::size_t>(f) * U + u];
            y[static_cast<std::size_t>(b) * U + u] = acc;
        }
}

template <typename T>
void batchnorm_forward_train(const T* x, int B, int C, int L, const T* gamma,
                             const T* beta, T eps, T* y) {
    const std::size_t N = static_cast<std::size_t>(B) * L;
    for (int c = 0; c < C; ++c) {
        T mu = T{};
        for (int b = 0; b < B; ++b)
            for (int i = 0; i < L; ++i) mu += x[(static_cast<std::size_t>(b) * C + c) * L + i];
        mu /= static_cast<T>(N);
        T v = T{};
        for (int b = 0; b < B; ++b)
            for (int i = 0; i < L; ++i) {
                T d = x[(static_cast<std::size_t>(b) * C + c) * L + i] - mu;
                v += d * d;
            }
        v /= static_cast<T>(N);
        for (int b = 0; b < B; ++b)
            for (int i = 0; i < L; ++i)
                y[(static_cast<std::size_t>(b) * C + c) * L + i] =
                    gamma[c] * (x[(static_cast<std::size_t>(b) * C + c) * L + i] - mu) /
                        std::sqrt(v + eps) +
                    beta[c];
    }
}

template <typename T>
void batchnorm_forward_eval(const T* x, int B, int C, int L, const T* gamma,
                            const T* beta, T eps, const T* running_mean,
                            const T* running_var, T* y) {
    for (int c = 0; c < C; ++c)
        for (int b = 0; b < B; ++b)
            for (int i = 0; i < L; ++i)
                y[(static_cast<std::size_t>(b) * C + c) * L + i] =
                    gamma[c] *
                        (x[(static_cast<std::size_t>(b) * C + c) * L + i] - running_mean[c]) /
                        std::sqrt(running_var[c] + eps) +
                    beta[c];
}

}  // namespace specmatch::ref
