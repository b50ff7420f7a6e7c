#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "specmatch/errors.hpp"

namespace specmatch {

// Dense row-major tensor; rank 3 = (batch, channels, length), rank 2 =
// (batch, features).
template <typename T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data.assign(count(shape), T{});
    }
    Tensor(std::vector<int> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != count(shape)) throw ShapeMismatch("tensor data/shape size");
    }

    static std::size_t count(const std::vector<int>& s) {
        std::size_t n = 1;
        for (int d : s) n *= static_cast<std::size_t>(d);
        return n;
    }

    int rank() const { return static_cast<int>(shape.size()); }
    std::size_t size() const { return data.size(); }

    T& at3(int b, int c, int i) {
        return data[(static_cast<std::size_t>(b) * shape[1] + c) * shape[2] + i];
    }
    const T& at3(int b, int c, int i) const {
        return data[(static_cast<std::size_t>(b) * shape[1] + c) * shape[2] + i];
    }
    T& at2(int b, int f) { return data[static_cast<std::size_t>(b) * shape[1] + f]; }
    const T& at2(int b, int f) const { return data[static_cast<std::size_t>(b) * shape[1] + f]; }
};

}  // namespace specmatch
