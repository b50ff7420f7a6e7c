#pragma once

#include <cstdint>
#include <utility>

#include "specmatch/spectrum.hpp"

namespace specmatch {

// Desk-scale synthetic stand-in for a mineral spectrum library: each class is
// a fixed set of Gaussian peaks, each sample adds a random polynomial
// baseline and Gaussian noise.
struct SynthConfig {
    int n_classes = 10;
    int samples_per_class = 6;
    std::pair<int, int> peak_count_range = {3, 6};
    int baseline_degree = 3;        // 0 disables the baseline
    double baseline_amplitude = 1.0;  // relative to unit peak height
    double noise_sigma = 0.01;      // relative to unit peak height
    GridSpec grid{200.0, 1400.0, 1024};
};

Dataset synth_dataset(const SynthConfig& cfg, std::uint64_t rng_seed);

}  // namespace specmatch
