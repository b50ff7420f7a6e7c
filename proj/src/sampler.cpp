#include "specmatch/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "specmatch/errors.hpp"
#include "specmatch/rng.hpp"

namespace specmatch {

std::pair<std::uint64_t, std::uint64_t> pair_counts(std::uint64_t n_classes,
                                                    std::uint64_t samples_per_class) {
    std::uint64_t positives = samples_per_class * (samples_per_class - 1) * n_classes / 2;
    std::uint64_t negatives =
        samples_per_class * samples_per_class * n_classes * (n_classes - 1) / 2;
    return {positives, negatives};
}

std::pair<std::uint64_t, std::uint64_t> dataset_pair_counts(const Dataset& ds) {
    std::uint64_t positives = 0, negatives = 0, total = 0;
    for (const auto& [cid, idx] : ds.class_index) {
        std::uint64_t m = idx.size();
        positives += m * (m - 1) / 2;
        negatives += total * m;
        total += m;
    }
    return {positives, negatives};
}

BootstrapPlan make_plan(const Dataset& ds, std::uint64_t rng_seed) {
    auto [pos, neg] = dataset_pair_counts(ds);
    if (pos == 0) throw NoPositivePairs();
    return {pos, neg, rng_seed};
}

std::vector<PairSample> sample_epoch(const Dataset& ds, const BootstrapPlan& plan,
                                     std::uint64_t epoch) {
    if (plan.s_m == 0) throw NoPositivePairs();
    Rng rng(mix_seed(plan.rng_seed, epoch));

    // cumulative weights: positive pairs per class, negative pairs per
    // unordered class pair (m_c * m_c'), so each pair in either population
    // is equally likely
    std::vector<int> class_ids;
    std::vector<const std::vector<std::size_t>*> members;
    for (const auto& [cid, idx] : ds.class_index) {
        class_ids.push_back(cid);
        members.push_back(&idx);
    }
    const std::size_t C = class_ids.size();
    std::vector<std::uint64_t> pos_cum(C);
    std::uint64_t pos_total = 0;
    for (std::size_t c = 0; c < C; ++c) {
        std::uint64_t m = members[c]->size();
        pos_total += m * (m - 1) / 2;
        pos_cum[c] = pos_total;
    }

    std::vector<std::uint64_t> neg_cum;
    std::vector<std::pair<std::size_t, std::size_t>> neg_class_pairs;
    std::uint64_t neg_total = 0;
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t d = c + 1; d < C; ++d) {
            neg_total += members[c]->size() * members[d]->size();
            neg_cum.push_back(neg_total);
            neg_class_pairs.emplace_back(c, d);
        }
    if (neg_total == 0) throw TooFewClasses("need >= 2 classes to form negative pairs");

    std::vector<PairSample> out;
    out.reserve(2 * plan.s_m);
    for (std::uint64_t i = 0; i < plan.s_m; ++i) {
        std::uint64_t r = rng.uniform_int(pos_total);
        std::size_t c = static_cast<std::size_t>(
            std::upper_bound(pos_cum.begin(), pos_cum.end(), r) - pos_cum.begin());
        const auto& m = *members[c];
        std::size_t i1 = static_cast<std::size_t>(rng.uniform_int(m.size()));
        std::size_t i2 = static_cast<std::size_t>(rng.uniform_int(m.size() - 1));
        if (i2 >= i1) ++i2;
        out.push_back({m[i1], m[i2], 1});
    }
    for (std::uint64_t i = 0; i < plan.s_m; ++i) {
        std::uint64_t r = rng.uniform_int(neg_total);
        std::size_t k = static_cast<std::size_t>(
            std::upper_bound(neg_cum.begin(), neg_cum.end(), r) - neg_cum.begin());
        auto [c, d] = neg_class_pairs[k];
        const auto& mc = *members[c];
        const auto& md = *members[d];
        out.push_back({mc[rng.uniform_int(mc.size())], md[rng.uniform_int(md.size())], 0});
    }
    rng.shuffle(out);
    return out;
}

ClassSplit split_classes(const std::vector<int>& class_ids, const SplitSpec& spec) {
    if (class_ids.size() < 3) throw TooFewClasses("split needs >= 3 classes");
    std::vector<int> ids = class_ids;
    Rng rng(spec.rng_seed);
    rng.shuffle(ids);
    const std::size_t n = ids.size();
    std::size_t n_train = static_cast<std::size_t>(std::llround(spec.train * n));
    std::size_t n_val = static_cast<std::size_t>(std::floor(spec.val * n));
    if (n_train + n_val > n) throw ConfigError("split fractions exceed 1");
    ClassSplit out;
    out.train.assign(ids.begin(), ids.begin() + n_train);
    out.val.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
    out.test.assign(ids.begin() + n_train + n_val, ids.end());
    return out;
}

Holdout holdout_one_per_class(const Dataset& ds, std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    Holdout out;
    std::vector<bool> held(ds.spectra.size(), false);
    for (const auto& [cid, idx] : ds.class_index) {
        if (idx.size() < 2) {
            out.skipped_classes.push_back(cid);
            continue;
        }
        std::size_t pick = idx[rng.uniform_int(idx.size())];
        out.test.push_back(pick);
        held[pick] = true;
    }
    for (std::size_t i = 0; i < ds.spectra.size(); ++i)
        if (!held[i]) out.rest.push_back(i);
    return out;
}

}  // namespace specmatch
