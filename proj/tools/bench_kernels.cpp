// Benchmark of the production (OpenMP) layer kernels against the serial
// reference versions, plus a bitwise agreement check on every shape run.
//
//   bench_kernels [--batch N] [--repeats N]

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "specmatch/kernels.hpp"
#include "specmatch/kernels_ref.hpp"
#include "specmatch/rng.hpp"

using namespace specmatch;

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_best_of(int repeats, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = Clock::now();
        fn();
        auto t1 = Clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

std::vector<float> random_vec(std::size_t n, Rng& rng) {
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(rng.uniform() * 2.0 - 1.0);
    return v;
}

bool bit_equal(const std::vector<float>& a, const std::vector<float>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

// The production batchnorm multiplies by a precomputed reciprocal where the
// reference divides, so the results can differ in the final ulp.
bool close_enough(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        float tol = 1e-5f * std::max(1.0f, std::max(std::abs(a[i]), std::abs(b[i])));
        if (std::abs(a[i] - b[i]) > tol) return false;
    }
    return true;
}

void report(const char* name, const std::string& shape, double serial, double parallel,
            bool identical) {
    std::printf("%-10s %-28s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   %s\n",
                name, shape.c_str(), serial * 1e3, parallel * 1e3, serial / parallel,
                identical ? "match" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    int B = 64, repeats = 5;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--batch") && i + 1 < argc)
            B = std::atoi(argv[++i]);
        else if (!std::strcmp(argv[i], "--repeats") && i + 1 < argc)
            repeats = std::atoi(argv[++i]);
        else {
            std::printf("usage: %s [--batch N] [--repeats N]\n", argv[0]);
            return 2;
        }
    }
#ifdef _OPENMP
    std::printf("threads: %d, batch: %d, best of %d\n", omp_get_max_threads(), B,
                repeats);
#else
    std::printf("threads: 1 (OpenMP off), batch: %d, best of %d\n", B, repeats);
#endif

    Rng rng(42);
    bool all_ok = true;

    // conv1d over the default tower's heaviest shapes
    struct ConvCase {
        int C, L, M, K;
    };
    for (const auto& cc : {ConvCase{1, 1024, 32, 9}, ConvCase{32, 508, 32, 9},
                           ConvCase{16, 250, 16, 7}}) {
        const int Lo = kernels::conv_out_len(cc.L, cc.K, 1);
        auto x = random_vec(static_cast<std::size_t>(B) * cc.C * cc.L, rng);
        auto w = random_vec(static_cast<std::size_t>(cc.M) * cc.C * cc.K, rng);
        auto bias = random_vec(cc.M, rng);
        std::vector<float> ys(static_cast<std::size_t>(B) * cc.M * Lo);
        std::vector<float> yp(ys.size());
        double ts = time_best_of(repeats, [&] {
            ref::conv1d_forward(x.data(), B, cc.C, cc.L, w.data(), bias.data(), cc.M,
                                cc.K, 1, ys.data());
        });
        double tp = time_best_of(repeats, [&] {
            kernels::conv1d_forward(x.data(), B, cc.C, cc.L, w.data(), bias.data(),
                                    cc.M, cc.K, 1, yp.data());
        });
        bool ok = bit_equal(ys, yp);
        all_ok = all_ok && ok;
        char shape[64];
        std::snprintf(shape, sizeof shape, "C=%d L=%d M=%d K=%d", cc.C, cc.L, cc.M,
                      cc.K);
        report("conv1d", shape, ts, tp, ok);
    }

    // maxpool
    {
        const int C = 32, L = 1016, K = 2, stride = 2;
        const int Lo = kernels::conv_out_len(L, K, stride);
        auto x = random_vec(static_cast<std::size_t>(B) * C * L, rng);
        std::vector<float> ys(static_cast<std::size_t>(B) * C * Lo), yp(ys.size());
        std::vector<std::int32_t> as(ys.size()), ap(ys.size());
        double ts = time_best_of(repeats, [&] {
            ref::maxpool_forward(x.data(), B, C, L, K, stride, ys.data(), as.data());
        });
        double tp = time_best_of(repeats, [&] {
            kernels::maxpool_forward(x.data(), B, C, L, K, stride, yp.data(), ap.data());
        });
        bool ok = bit_equal(ys, yp) && as == ap;
        all_ok = all_ok && ok;
        report("maxpool", "C=32 L=1016 k=2 s=2", ts, tp, ok);
    }

    // dense: flattened features into a wide head
    {
        const int F = 2048, U = 512;
        auto x = random_vec(static_cast<std::size_t>(B) * F, rng);
        auto w = random_vec(static_cast<std::size_t>(F) * U, rng);
        auto bias = random_vec(U, rng);
        std::vector<float> ys(static_cast<std::size_t>(B) * U), yp(ys.size());
        double ts = time_best_of(repeats, [&] {
            ref::dense_forward(x.data(), B, F, w.data(), bias.data(), U, ys.data());
        });
        double tp = time_best_of(repeats, [&] {
            kernels::dense_forward(x.data(), B, F, w.data(), bias.data(), U, yp.data());
        });
        bool ok = bit_equal(ys, yp);
        all_ok = all_ok && ok;
        report("dense", "F=2048 U=512", ts, tp, ok);
    }

    // batchnorm (eval mode is the apples-to-apples comparison: the training
    // entry points differ in what statistics they return)
    {
        const int C = 32, L = 1016;
        auto x = random_vec(static_cast<std::size_t>(B) * C * L, rng);
        auto gamma = random_vec(C, rng), beta = random_vec(C, rng);
        auto rm = random_vec(C, rng);
        std::vector<float> rv(C, 1.0f);
        std::vector<float> ys(x.size()), yp(x.size());
        double ts = time_best_of(repeats, [&] {
            ref::batchnorm_forward_eval(x.data(), B, C, L, gamma.data(), beta.data(),
                                        1e-5f, rm.data(), rv.data(), ys.data());
        });
        double tp = time_best_of(repeats, [&] {
            kernels::batchnorm_forward_eval(x.data(), B, C, L, gamma.data(),
                                            beta.data(), 1e-5f, rm.data(), rv.data(),
                                            yp.data());
        });
        bool ok = close_enough(ys, yp);
        all_ok = all_ok && ok;
        report("batchnorm", "C=32 L=1016 (eval)", ts, tp, ok);
    }

    if (!all_ok) {
        std::printf("FAILURE: parallel kernels diverged from the serial reference\n");
        return 1;
    }
    return 0;
}
