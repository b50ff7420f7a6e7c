#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "specmatch/errors.hpp"
#include "specmatch/sampler.hpp"

using namespace specmatch;

namespace {

// Minimal dataset with the given class sizes; intensities are irrelevant here.
Dataset make_dataset(const std::vector<int>& class_sizes) {
    Dataset ds;
    int cid = 0;
    for (int sz : class_sizes) {
        for (int i = 0; i < sz; ++i) {
            Spectrum s;
            s.class_id = cid;
            s.sample_id = std::to_string(cid) + "_" + std::to_string(i);
            s.intensities = {0.0f};
            ds.spectra.push_back(std::move(s));
        }
        ++cid;
    }
    ds.rebuild_index();
    return ds;
}

// Brute-force pair enumeration oracle.
std::pair<std::uint64_t, std::uint64_t> brute_counts(const Dataset& ds) {
    std::uint64_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < ds.spectra.size(); ++i)
        for (std::size_t j = i + 1; j < ds.spectra.size(); ++j)
            (ds.spectra[i].class_id == ds.spectra[j].class_id ? pos : neg) += 1;
    return {pos, neg};
}

}  // namespace

TEST_CASE("pair_counts closed form matches brute force") {
    for (std::uint64_t n : {1, 2, 3, 5, 8})
        for (std::uint64_t m : {1, 2, 3, 4, 7}) {
            Dataset ds = make_dataset(std::vector<int>(n, static_cast<int>(m)));
            auto expect = brute_counts(ds);
            CHECK(pair_counts(n, m) == expect);
        }
}

TEST_CASE("pair_counts reference values") {
    // 100 classes x 10 samples
    CHECK(pair_counts(100, 10) == std::pair<std::uint64_t, std::uint64_t>{4500, 495000});
    // single class: no negatives
    CHECK(pair_counts(1, 10).second == 0);
    // singleton classes: no positives
    CHECK(pair_counts(10, 1).first == 0);
    CHECK(pair_counts(3, 2) == std::pair<std::uint64_t, std::uint64_t>{3, 12});
}

TEST_CASE("dataset_pair_counts handles unequal class sizes") {
    Dataset ds = make_dataset({3, 1, 4, 2});
    CHECK(dataset_pair_counts(ds) == brute_counts(ds));
}

TEST_CASE("make_plan rejects datasets without positive pairs") {
    Dataset ds = make_dataset({1, 1, 1});
    CHECK_THROWS_AS(make_plan(ds, 0), NoPositivePairs);
    Dataset ok = make_dataset({2, 1});
    CHECK(make_plan(ok, 7).s_m == 1);
}

TEST_CASE("sample_epoch is balanced and labels are consistent") {
    Dataset ds = make_dataset({4, 3, 5});
    auto plan = make_plan(ds, 99);
    auto pairs = sample_epoch(ds, plan, 0);
    CHECK(pairs.size() == 2 * plan.s_m);
    std::uint64_t positives = 0;
    for (const auto& p : pairs) {
        CHECK(p.a != p.b);  // no self pairs
        bool same = ds.spectra[p.a].class_id == ds.spectra[p.b].class_id;
        CHECK(p.label == (same ? 1 : 0));
        positives += p.label;
    }
    CHECK(positives == plan.s_m);
}

TEST_CASE("sample_epoch determinism and epoch separation") {
    Dataset ds = make_dataset({3, 3, 3});
    auto plan = make_plan(ds, 5);
    auto e0a = sample_epoch(ds, plan, 0);
    auto e0b = sample_epoch(ds, plan, 0);
    REQUIRE(e0a.size() == e0b.size());
    for (std::size_t i = 0; i < e0a.size(); ++i) {
        CHECK(e0a[i].a == e0b[i].a);
        CHECK(e0a[i].b == e0b[i].b);
        CHECK(e0a[i].label == e0b[i].label);
    }
    auto e1 = sample_epoch(ds, plan, 1);
    bool differs = false;
    for (std::size_t i = 0; i < e0a.size(); ++i)
        if (e0a[i].a != e1[i].a || e0a[i].b != e1[i].b) differs = true;
    CHECK(differs);
}

TEST_CASE("sample_epoch draws each pair with near-uniform frequency") {
    Dataset ds = make_dataset({3, 3, 3});
    auto plan = make_plan(ds, 123);
    // populations: 9 distinct positive pairs, 27 distinct negative pairs
    REQUIRE(plan.s_m == 9);

    std::map<std::pair<std::size_t, std::size_t>, int> pos_freq, neg_freq;
    const int epochs = 2000;
    for (int e = 0; e < epochs; ++e)
        for (const auto& p : sample_epoch(ds, plan, static_cast<std::uint64_t>(e))) {
            auto key = std::minmax(p.a, p.b);
            (p.label ? pos_freq : neg_freq)[key] += 1;
        }
    CHECK(pos_freq.size() == 9);
    CHECK(neg_freq.size() == 27);
    // expected: 2000 draws per positive pair, 667 per negative pair; a 10%
    // band is ~4.5 / ~8 standard deviations
    for (const auto& [k, n] : pos_freq) CHECK(std::abs(n - 2000) < 200);
    for (const auto& [k, n] : neg_freq) CHECK(std::abs(n - 667) < 100);
}

TEST_CASE("sample_epoch needs at least two classes") {
    Dataset ds = make_dataset({4});
    auto plan = make_plan(ds, 0);
    CHECK_THROWS_AS(sample_epoch(ds, plan, 0), TooFewClasses);
}

TEST_CASE("split_classes sizes: 512 classes at 0.5/0.1/0.4") {
    std::vector<int> ids(512);
    std::iota(ids.begin(), ids.end(), 0);
    auto split = split_classes(ids, SplitSpec{0.5, 0.1, 0.4, 42});
    CHECK(split.train.size() == 256);
    CHECK(split.val.size() == 51);  // floor(51.2)
    CHECK(split.test.size() == 205);
}

TEST_CASE("split_classes sizes: 10 classes") {
    std::vector<int> ids(10);
    std::iota(ids.begin(), ids.end(), 0);
    auto split = split_classes(ids, SplitSpec{0.5, 0.1, 0.4, 1});
    CHECK(split.train.size() == 5);
    CHECK(split.val.size() == 1);
    CHECK(split.test.size() == 4);
}

TEST_CASE("split_classes partitions: disjoint, exhaustive, deterministic") {
    std::vector<int> ids(37);
    std::iota(ids.begin(), ids.end(), 100);
    SplitSpec spec;
    spec.rng_seed = 9;
    auto s1 = split_classes(ids, spec);
    auto s2 = split_classes(ids, spec);
    CHECK(s1.train == s2.train);
    CHECK(s1.val == s2.val);
    CHECK(s1.test == s2.test);

    std::set<int> all;
    for (int c : s1.train) all.insert(c);
    for (int c : s1.val) all.insert(c);
    for (int c : s1.test) all.insert(c);
    CHECK(all.size() == ids.size());  // disjoint and exhaustive
    CHECK(all == std::set<int>(ids.begin(), ids.end()));

    spec.rng_seed = 10;
    auto s3 = split_classes(ids, spec);
    CHECK(s3.train != s1.train);  // seed actually shuffles
}

TEST_CASE("split_classes rejects tiny inputs and bad fractions") {
    CHECK_THROWS_AS(split_classes({1, 2}, SplitSpec{}), TooFewClasses);
    std::vector<int> ids(10);
    std::iota(ids.begin(), ids.end(), 0);
    CHECK_THROWS_AS(split_classes(ids, SplitSpec{0.9, 0.5, 0.0, 0}), ConfigError);
}

TEST_CASE("holdout_one_per_class") {
    Dataset ds = make_dataset({3, 1, 4, 2});
    auto h = holdout_one_per_class(ds, 17);
    // class 1 has a single sample: skipped, kept in rest
    CHECK(h.skipped_classes == std::vector<int>{1});
    CHECK(h.test.size() == 3);
    CHECK(h.rest.size() == ds.spectra.size() - 3);

    // test indices are one per distinct eligible class
    std::set<int> test_classes;
    for (auto i : h.test) test_classes.insert(ds.spectra[i].class_id);
    CHECK(test_classes == std::set<int>{0, 2, 3});

    // partition: no index in both, all indices covered
    std::set<std::size_t> seen(h.test.begin(), h.test.end());
    for (auto i : h.rest) CHECK(seen.insert(i).second);
    CHECK(seen.size() == ds.spectra.size());

    auto h2 = holdout_one_per_class(ds, 17);
    CHECK(h2.test == h.test);
}
