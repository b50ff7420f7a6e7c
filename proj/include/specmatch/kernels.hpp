#pragma once

// Production layer kernels. Parallel loops are arranged owner-computes: each
// output element is accumulated by exactly one thread in a fixed serial
// order, so results are bit-identical at any thread count. Serial reference
// versions live in kernels_ref.hpp.

#include <cmath>
#include <cstdint>
#include <vector>

namespace specmatch::kernels {

inline int conv_out_len(int L, int K, int stride) { return (L - K) / stride + 1; }

// y[b,m,i] = bias[m] + sum_{c,k} w[m,c,k] * x[b,c,i*stride+k]
template <typename T>
void conv1d_forward(const T* x, int B, int C, int L, const T* w, const T* bias, int M,
                    int K, int stride, T* y) {
    const int Lo = conv_out_len(L, K, stride);
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < B; ++b) {
        for (int m = 0; m < M; ++m) {
            const T* wm = w + static_cast<std::size_t>(m) * C * K;
            for (int i = 0; i < Lo; ++i) {
                T acc = bias[m];
                for (int c = 0; c < C; ++c) {
                    const T* xc = x + (static_cast<std::size_t>(b) * C + c) * L + i * stride;
                    const T* wc = wm + static_cast<std::size_t>(c) * K;
                    for (int k = 0; k < K; ++k) acc += wc[k] * xc[k];
                }
                y[(static_cast<std::size_t>(b) * M + m) * Lo + i] = acc;
            }
        }
    }
}

template <typename T>
void conv1d_backward(const T* x, const T* w, const T* gy, int B, int C, int L, int M,
                     int K, int stride, T* gx, T* gw, T* gb) {
    const int Lo = conv_out_len(L, K, stride);
#pragma omp parallel for schedule(static)
    for (int m = 0; m < M; ++m) {
        T acc = T{};
        for (int b = 0; b < B; ++b) {
            const T* g = gy + (static_cast<std::size_t>(b) * M + m) * Lo;
            for (int i = 0; i < Lo; ++i) acc += g[i];
        }
        gb[m] = acc;
        for (int c = 0; c < C; ++c) {
            for (int k = 0; k < K; ++k) {
                T wacc = T{};
                for (int b = 0; b < B; ++b) {
                    const T* g = gy + (static_cast<std::size_t>(b) * M + m) * Lo;
                    const T* xc = x + (static_cast<std::size_t>(b) * C + c) * L;
                    for (int i = 0; i < Lo; ++i) wacc += g[i] * xc[i * stride + k];
                }
                gw[(static_cast<std::size_t>(m) * C + c) * K + k] = wacc;
            }
        }
    }
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < B; ++b) {
        for (int c = 0; c < C; ++c) {
            T* gxc = gx + (static_cast<std::size_t>(b) * C + c) * L;
            for (int j = 0; j < L; ++j) gxc[j] = T{};
            for (int m = 0; m < M; ++m) {
                const T* g = gy + (static_cast<std::size_t>(b) * M + m) * Lo;
                const T* wc = w + (static_cast<std::size_t>(m) * C + c) * K;
                for (int i = 0; i < Lo; ++i) {
                    const T gi = g[i];
                    T* base = gxc + i * stride;
                    for (int k = 0; k < K; ++k) base[k] += gi * wc[k];
                }
            }
        }
    }
}

template <typename T>
void leakyrelu_forward(const T* x, std::size_t n, T slope, T* y) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        y[i] = x[i] >= T{} ? x[i] : slope * x[i];
}

template <typename T>
void leakyrelu_backward(const T* x, const T* gy, std::size_t n, T slope, T* gx) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        gx[i] = x[i] >= T{} ? gy[i] : slope * gy[i];
}

// ties break to the lowest index
template <typename T>
void maxpool_forward(const T* x, int B, int C, int L, int K, int stride, T* y,
                     std::int32_t* argmax) {
    const int Lo = conv_out_len(L, K, stride);
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < B; ++b) {
        for (int c = 0; c < C; ++c) {
            const T* xc = x + (static_cast<std::size_t>(b) * C + c) * L;
            T* yc = y + (static_cast<std::size_t>(b) * C + c) * Lo;
            std::int32_t* ac = argmax + (static_cast<std::size_t>(b) * C + c) * Lo;
            for (int i = 0; i < Lo; ++i) {
                int best = i * stride;
                T bv = xc[best];
                for (int k = 1; k < K; ++k) {
                    int j = i * stride + k;
                    if (xc[j] > bv) {
                        bv = xc[j];
                        best = j;
                    }
                }
                yc[i] = bv;
                ac[i] = best;
            }
        }
    }
}

template <typename T>
void maxpool_backward(const std::int32_t* argmax, const T* gy, int B, int C, int L,
                      int Lo, T* gx) {
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < B; ++b) {
        for (int c = 0; c < C; ++c) {
            const T* gyc = gy + (static_cast<std::size_t>(b) * C + c) * Lo;
            const std::int32_t* ac = argmax + (static_cast<std::size_t>(b) * C + c) * Lo;
            T* gxc = gx + (static_cast<std::size_t>(b) * C + c) * L;
            for (int j = 0; j < L; ++j) gxc[j] = T{};
            for (int i = 0; i < Lo; ++i) gxc[ac[i]] += gyc[i];
        }
    }
}

// y[b,u] = b[u] + sum_f x[b,f] * w[f,u]
template <typename T>
void dense_forward(const T* x, int B, int F, const T* w, const T* bias, int U, T* y) {
#pragma omp parallel for schedule(static)
    for (int b = 0; b < B; ++b) {
        const T* xb = x + static_cast<std::size_t>(b) * F;
        T* yb = y + static_cast<std::size_t>(b) * U;
        for (int u = 0; u < U; ++u) yb[u] = bias[u];
        for (int f = 0; f < F; ++f) {
            const T xv = xb[f];
            const T* wf = w + static_cast<std::size_t>(f) * U;
            for (int u = 0; u < U; ++u) yb[u] += xv * wf[u];
        }
    }
}

template <typename T>
void dense_backward(const T* x, const T* w, const T* gy, int B, int F, int U, T* gx,
                    T* gw, T* gb) {
#pragma omp parallel for schedule(static)
    for (int u = 0; u < U; ++u) {
        T acc = T{};
        for (int b = 0; b < B; ++b) acc += gy[static_cast<std::size_t>(b) * U + u];
        gb[u] = acc;
    }
#pragma omp parallel for schedule(static)
    for (int f = 0; f < F; ++f) {
        T* gwf = gw + static_cast<std::size_t>(f) * U;
        for (int u = 0; u < U; ++u) gwf[u] = T{};
        for (int b = 0; b < B; ++b) {
            const T xv = x[static_cast<std::size_t>(b) * F + f];
            const T* gyb = gy + static_cast<std::size_t>(b) * U;
            for (int u = 0; u < U; ++u) gwf[u] += xv * gyb[u];
        }
    }
#pragma omp parallel for schedule(static)
    for (int b = 0; b < B; ++b) {
        const T* gyb = gy + static_cast<std::size_t>(b) * U;
        T* gxb = gx + static_cast<std::size_t>(b) * F;
        for (int f = 0; f < F; ++f) {
            T acc = T{};
            const T* wf = w + static_cast<std::size_t>(f) * U;
            for (int u = 0; u < U; ++u) acc += wf[u] * gyb[u];
            gxb[f] = acc;
        }
    }
}

// Per-channel statistics over batch and length; biased variance (1/N).
template <typename T>
void batchnorm_forward_train(const T* x, int B, int C, int L, const T* gamma,
                             const T* beta, T eps, T momentum, T* y, T* mean, T* var,
                             T* xhat, T* running_mean, T* running_var) {
    const std::size_t N = static_cast<std::size_t>(B) * L;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < C; ++c) {
        T mu = T{};
        for (int b = 0; b < B; ++b) {
            const T* xc = x + (static_cast<std::size_t>(b) * C + c) * L;
            for (int i = 0; i < L; ++i) mu += xc[i];
        }
        mu /= static_cast<T>(N);
        T v = T{};
        for (int b = 0; b < B; ++b) {
            const T* xc = x + (static_cast<std::size_t>(b) * C + c) * L;
            for (int i = 0; i < L; ++i) {
                T d = xc[i] - mu;
                v += d * d;
            }
        }
        v /= static_cast<T>(N);
        mean[c] = mu;
        var[c] = v;
        const T inv_std = T(1) / std::sqrt(v + eps);
        for (int b = 0; b < B; ++b) {
            const T* xc = x + (static_cast<std::size_t>(b) * C + c) * L;
            T* yc = y + (static_cast<std::size_t>(b) * C + c) * L;
            T* hc = xhat + (static_cast<std::size_t>(b) * C + c) * L;
            for (int i = 0; i < L; ++i) {
                hc[i] = (xc[i] - mu) * inv_std;
                yc[i] = gamma[c] * hc[i] + beta[c];
            }
        }
        running_mean[c] = momentum * running_mean[c] + (T(1) - momentum) * mu;
        running_var[c] = momentum * running_var[c] + (T(1) - momentum) * v;
    }
}

template <typename T>
void batchnorm_forward_eval(const T* x, int B, int C, int L, const T* gamma,
                            const T* beta, T eps, const T* running_mean,
                            const T* running_var, T* y) {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < C; ++c) {
        const T inv_std = T(1) / std::sqrt(running_var[c] + eps);
        for (int b = 0; b < B; ++b) {
            const T* xc = x + (static_cast<std::size_t>(b) * C + c) * L;
            T* yc = y + (static_cast<std::size_t>(b) * C + c) * L;
            for (int i = 0; i < L; ++i)
                yc[i] = gamma[c] * (xc[i] - running_mean[c]) * inv_std + beta[c];
        }
    }
}

// Full train-mode gradient including the batch-statistic terms.
template <typename T>
void batchnorm_backward(const T* gy, const T* xhat, const T* mean, const T* var,
                        const T* gamma, T eps, int B, int C, int L, T* gx, T* ggamma,
                        T* gbeta) {
    const std::size_t N = static_cast<std::size_t>(B) * L;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < C; ++c) {
        T sum_gy = T{}, sum_gy_xhat = T{};
        for (int b = 0; b < B; ++b) {
            const T* gc = gy + (static_cast<std::size_t>(b) * C + c) * L;
            const T* hc = xhat + (static_cast<std::size_t>(b) * C + c) * L;
            for (int i = 0; i < L; ++i) {
                sum_gy += gc[i];
                sum_gy_xhat += gc[i] * hc[i];
            }
        }
        ggamma[c] = sum_gy_xhat;
        gbeta[c] = sum_gy;
        const T inv_std = T(1) / std::sqrt(var[c] + eps);
        const T gN = gamma[c] * inv_std / static_cast<T>(N);
        for (int b = 0; b < B; ++b) {
            const T* gc = gy + (static_cast<std::size_t>(b) * C + c) * L;
            const T* hc = xhat + (static_cast<std::size_t>(b) * C + c) * L;
            T* gxc = gx + (static_cast<std::size_t>(b) * C + c) * L;
            for (int i = 0; i < L; ++i)
                gxc[i] = gN * (static_cast<T>(N) * gc[i] - sum_gy - hc[i] * sum_gy_xhat);
        }
    }
}

}  // namespace specmatch::kernels
