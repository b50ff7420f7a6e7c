#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "specmatch/dataset_cache.hpp"
#include "specmatch/errors.hpp"
#include "specmatch/rruff.hpp"
#include "specmatch/spectrum.hpp"
#include "specmatch/synth.hpp"

using namespace specmatch;

TEST_CASE("parse_rruff basic file") {
    auto raw = parse_rruff(std::string("##NAMES=Quartz\n100.0, 5.0\n101.0, 7.0\n##END="));
    CHECK(raw.points.size() == 2);
    CHECK(raw.metadata.at("NAMES") == "Quartz");
    CHECK(raw.points[0].first == doctest::Approx(100.0));
    CHECK(raw.points[1].second == doctest::Approx(7.0));
}

TEST_CASE("parse_rruff rejects non-monotonic wavenumbers") {
    CHECK_THROWS_AS(parse_rruff(std::string("100.0, 5.0\n99.0, 6.0")), NonMonotonicGrid);
}

TEST_CASE("parse_rruff rejects short and malformed input") {
    CHECK_THROWS_AS(parse_rruff(std::string("100.0, 5.0")), EmptySpectrum);
    CHECK_THROWS_AS(parse_rruff(std::string("100.0, 5.0\nnot a line\n")), MalformedLine);
    try {
        parse_rruff(std::string("100.0, 5.0\nbogus\n"));
    } catch (const MalformedLine& e) {
        CHECK(e.line_no == 2);
    }
}

TEST_CASE("parse_rruff counts headers and data lines independently") {
    // oracle: build the file line by line and count what went in
    std::ostringstream file;
    int n_headers = 3, n_points = 1000;
    file << "##NAMES=Test\n##RRUFFID=R1\n##LOCALITY=here\n";
    for (int i = 0; i < n_points; ++i) file << 100.0 + i << ", " << i % 7 << "\n";
    auto raw = parse_rruff(file.str());
    CHECK(static_cast<int>(raw.points.size()) == n_points);
    CHECK(static_cast<int>(raw.metadata.size()) == n_headers);
}

TEST_CASE("parse/serialize round-trip preserves points and metadata") {
    RawSpectrum raw;
    raw.metadata = {{"NAMES", "Calcite"}, {"RRUFFID", "R050048"}};
    for (int i = 0; i < 50; ++i) raw.points.emplace_back(100.0 + 1.5 * i, 0.25 * (i % 9));
    auto round = parse_rruff(serialize_rruff(raw));
    CHECK(round.points == raw.points);
    CHECK(round.metadata == raw.metadata);
}

TEST_CASE("parse_rruff tolerates CRLF and blank lines") {
    auto raw = parse_rruff(std::string("##NAMES=X\r\n\r\n100.0, 1.0\r\n101.0, 2.0\r\n"));
    CHECK(raw.points.size() == 2);
    CHECK(raw.metadata.at("NAMES") == "X");
}

TEST_CASE("resample linear interpolation") {
    RawSpectrum raw;
    raw.points = {{0, 0}, {2, 2}};
    auto v = resample(raw, GridSpec{0, 2, 3});
    CHECK(v == std::vector<float>{0, 1, 2});
}

TEST_CASE("resample constant signal") {
    RawSpectrum raw;
    raw.points = {{0, 5}, {1, 5}};
    auto v = resample(raw, GridSpec{0, 1, 4});
    CHECK(v == std::vector<float>{5, 5, 5, 5});
}

TEST_CASE("resample piecewise-linear oracle") {
    RawSpectrum raw;
    raw.points = {{0, 0}, {1, 1}, {3, 0}};
    auto v = resample(raw, GridSpec{0, 3, 7});
    // oracle: evaluate the piecewise-linear interpolant at each grid point
    auto oracle = [&](double x) {
        for (std::size_t s = 0; s + 1 < raw.points.size(); ++s) {
            auto [x0, y0] = raw.points[s];
            auto [x1, y1] = raw.points[s + 1];
            if (x >= x0 && x <= x1) return y0 + (x - x0) / (x1 - x0) * (y1 - y0);
        }
        return 0.0;
    };
    GridSpec g{0, 3, 7};
    for (int i = 0; i < g.length; ++i)
        CHECK(v[i] == doctest::Approx(oracle(g.point(i))).epsilon(1e-6));
    std::vector<float> expected{0, 0.5, 1, 0.75, 0.5, 0.25, 0};
    for (int i = 0; i < 7; ++i) CHECK(v[i] == doctest::Approx(expected[i]));
}

TEST_CASE("resample clamps out-of-span grid points") {
    RawSpectrum raw;
    raw.points = {{10, 3}, {20, 7}};
    auto v = resample(raw, GridSpec{0, 30, 4});  // points at 0, 10, 20, 30
    CHECK(v[0] == doctest::Approx(3));
    CHECK(v[3] == doctest::Approx(7));
}

TEST_CASE("resample rejects invalid grids") {
    RawSpectrum raw;
    raw.points = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(resample(raw, GridSpec{0, 1, 1}), InvalidGrid);
    CHECK_THROWS_AS(resample(raw, GridSpec{1, 0, 4}), InvalidGrid);
}

TEST_CASE("normalize_minmax") {
    CHECK(normalize_minmax({2, 4, 6}) == std::vector<float>{0, 0.5, 1});
    CHECK(normalize_minmax({7, 7, 7}) == std::vector<float>{0, 0, 0});
    CHECK(normalize_minmax({-1, 0, 3}) == std::vector<float>{0, 0.25, 1});
    std::vector<float> bad{1.0f, std::nanf("")};
    CHECK_THROWS_AS(normalize_minmax(bad), NonFiniteInput);
}

TEST_CASE("normalize_minmax is idempotent") {
    std::vector<float> v{0.3f, 1.7f, -2.0f, 0.9f, 0.0f};
    auto once = normalize_minmax(v);
    CHECK(normalize_minmax(once) == once);
}

TEST_CASE("augment pure shift zero-pads") {
    CHECK(shift_zero_pad({1, 2, 3, 4}, 2) == std::vector<float>{0, 0, 1, 2});
    CHECK(shift_zero_pad({1, 2, 3, 4}, -1) == std::vector<float>{2, 3, 4, 0});
}

TEST_CASE("augment global scaling undone by re-normalization") {
    Spectrum s;
    s.intensities = {0, 0.5, 1};
    s.grid = GridSpec{0, 2, 3};
    AugmentPolicy p;
    p.max_shift = 0;
    p.noise_sigma = 0;
    p.scale_lo = p.scale_hi = 0.5;
    auto out = augment(s, p, 42);
    CHECK(out.intensities[0] == doctest::Approx(0));
    CHECK(out.intensities[1] == doctest::Approx(0.5));
    CHECK(out.intensities[2] == doctest::Approx(1));
}

TEST_CASE("augment deterministic for a fixed seed") {
    Spectrum s;
    s.grid = GridSpec{0, 63, 64};
    s.intensities.assign(64, 0.0f);
    for (int i = 0; i < 64; ++i) s.intensities[i] = static_cast<float>(i % 5) / 4.0f;
    AugmentPolicy p;
    p.noise_sigma = 0.01;
    auto a = augment(s, p, 1234);
    auto b = augment(s, p, 1234);
    CHECK(a.intensities == b.intensities);
    auto c = augment(s, p, 1235);
    CHECK(a.intensities != c.intensities);
}

TEST_CASE("augment with all-zero policy is the identity") {
    Spectrum s;
    s.grid = GridSpec{0, 7, 8};
    s.intensities = normalize_minmax({1, 5, 2, 8, 0, 3, 7, 4});
    AugmentPolicy p;
    p.max_shift = 0;
    p.noise_sigma = 0;
    p.scale_lo = p.scale_hi = 1.0;
    CHECK(p.is_identity());
    CHECK(augment(s, p, 99).intensities == s.intensities);
}

TEST_CASE("synth_dataset cardinality and determinism") {
    SynthConfig cfg;
    cfg.n_classes = 2;
    cfg.samples_per_class = 3;
    cfg.peak_count_range = {3, 6};
    cfg.grid.length = 64;
    Dataset a = synth_dataset(cfg, 1);
    CHECK(a.spectra.size() == 6);
    CHECK(a.n_classes() == 2);
    Dataset b = synth_dataset(cfg, 1);
    for (std::size_t i = 0; i < a.spectra.size(); ++i)
        CHECK(a.spectra[i].intensities == b.spectra[i].intensities);
}

TEST_CASE("synth_dataset without sample randomness gives identical samples") {
    SynthConfig cfg;
    cfg.n_classes = 3;
    cfg.samples_per_class = 4;
    cfg.baseline_degree = 0;
    cfg.noise_sigma = 0.0;
    cfg.grid.length = 64;
    Dataset ds = synth_dataset(cfg, 7);
    for (const auto& [cid, idx] : ds.class_index)
        for (std::size_t i : idx)
            CHECK(ds.spectra[i].intensities == ds.spectra[idx.front()].intensities);
}

TEST_CASE("synth_dataset class separability without noise or baseline") {
    SynthConfig cfg;
    cfg.n_classes = 5;
    cfg.samples_per_class = 3;
    cfg.baseline_degree = 0;
    cfg.noise_sigma = 0.0;
    cfg.grid.length = 128;
    Dataset ds = synth_dataset(cfg, 3);
    for (std::size_t q = 0; q < ds.spectra.size(); ++q) {
        double best = 1e300;
        int best_class = -1;
        for (std::size_t r = 0; r < ds.spectra.size(); ++r) {
            if (r == q) continue;
            double d = 0;
            for (std::size_t i = 0; i < ds.spectra[q].intensities.size(); ++i) {
                double diff = ds.spectra[q].intensities[i] - ds.spectra[r].intensities[i];
                d += diff * diff;
            }
            if (d < best) {
                best = d;
                best_class = ds.spectra[r].class_id;
            }
        }
        CHECK(best_class == ds.spectra[q].class_id);
    }
}

TEST_CASE("dataset cache round-trip") {
    SynthConfig cfg;
    cfg.n_classes = 3;
    cfg.samples_per_class = 2;
    cfg.grid.length = 32;
    Dataset ds = synth_dataset(cfg, 11);
    auto path = std::filesystem::temp_directory_path() / "specmatch_test_cache.spcd";
    write_dataset_cache(ds, path.string());
    Dataset back = read_dataset_cache(path.string());
    REQUIRE(back.spectra.size() == ds.spectra.size());
    for (std::size_t i = 0; i < ds.spectra.size(); ++i) {
        CHECK(back.spectra[i].intensities == ds.spectra[i].intensities);
        CHECK(back.spectra[i].class_id == ds.spectra[i].class_id);
        CHECK(back.spectra[i].sample_id == ds.spectra[i].sample_id);
        CHECK(back.spectra[i].grid == ds.spectra[i].grid);
    }
    CHECK(back.class_names == ds.class_names);
    std::filesystem::remove(path);
}
