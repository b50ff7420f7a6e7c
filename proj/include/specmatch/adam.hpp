#pragma once

#include <cmath>
#include <vector>

#include "specmatch/errors.hpp"
#include "specmatch/model.hpp"

namespace specmatch {

template <typename T>
struct AdamState {
    std::vector<std::vector<T>> m, v;
    long t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void init(const std::vector<ParamRef<T>>& params) {
        m.clear();
        v.clear();
        for (const auto& p : params) {
            m.emplace_back(p.value->size(), T{});
            v.emplace_back(p.value->size(), T{});
        }
        t = 0;
    }
};

// Standard Adam with bias correction; grads read from each param's grad slot.
template <typename T>
void adam_step(std::vector<ParamRef<T>>& params, AdamState<T>& st, double lr) {
    if (st.m.size() != params.size()) throw ShapeMismatch("adam state size");
    ++st.t;
    const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& value = *params[p].value;
        const auto& grad = *params[p].grad;
        if (grad.size() != value.size()) throw ShapeMismatch("adam grad size");
        auto& m = st.m[p];
        auto& v = st.v[p];
        for (std::size_t i = 0; i < value.size(); ++i) {
            double g = static_cast<double>(grad[i]);
            double mi = st.beta1 * m[i] + (1.0 - st.beta1) * g;
            double vi = st.beta2 * v[i] + (1.0 - st.beta2) * g * g;
            m[i] = static_cast<T>(mi);
            v[i] = static_cast<T>(vi);
            double mhat = mi / bc1;
            double vhat = vi / bc2;
            value[i] = static_cast<T>(value[i] - lr * mhat / (std::sqrt(vhat) + st.eps));
        }
    }
}

}  // namespace specmatch
