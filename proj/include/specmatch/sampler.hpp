#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "specmatch/spectrum.hpp"

namespace specmatch {

// A pair by dataset index; label 1 iff same class.
struct PairSample {
    std::size_t a;
    std::size_t b;
    int label;
};

struct BootstrapPlan {
    std::uint64_t s_m = 0;  // available positive pairs
    std::uint64_t s_n = 0;  // available negative pairs
    std::uint64_t rng_seed = 0;
};

struct SplitSpec {
    double train = 0.5;
    double val = 0.1;
    double test = 0.4;
    std::uint64_t rng_seed = 0;
};

struct ClassSplit {
    std::vector<int> train, val, test;
};

// Closed-form pair counts for N classes of M samples each:
// positives M(M-1)N/2, negatives M^2 N(N-1)/2.
std::pair<std::uint64_t, std::uint64_t> pair_counts(std::uint64_t n_classes,
                                                    std::uint64_t samples_per_class);

// Generalization to unequal class sizes; used to size bootstrap epochs.
std::pair<std::uint64_t, std::uint64_t> dataset_pair_counts(const Dataset& ds);

BootstrapPlan make_plan(const Dataset& ds, std::uint64_t rng_seed);

// One balanced bootstrap epoch: s_m positive and s_m negative pairs, both
// sampled uniformly with replacement from their populations, shuffled.
// Deterministic per (plan seed, epoch index).
std::vector<PairSample> sample_epoch(const Dataset& ds, const BootstrapPlan& plan,
                                     std::uint64_t epoch);

// Class-disjoint split: train = round(f_train * N), val = floor(f_val * N),
// remainder to test.
ClassSplit split_classes(const std::vector<int>& class_ids, const SplitSpec& spec);

struct Holdout {
    std::vector<std::size_t> test;  // one sample per eligible class
    std::vector<std::size_t> rest;
    std::vector<int> skipped_classes;  // single-sample classes, kept in rest
};

Holdout holdout_one_per_class(const Dataset& ds, std::uint64_t rng_seed);

}  // namespace specmatch
