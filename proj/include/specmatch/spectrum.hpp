#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace specmatch {

// Uniform wavenumber grid: L points from start to end inclusive.
struct GridSpec {
    double start = 200.0;
    double end = 1400.0;
    int length = 1024;

    double step() const { return (end - start) / (length - 1); }
    double point(int i) const { return start + step() * i; }
    bool operator==(const GridSpec&) const = default;
};

struct RawSpectrum {
    std::vector<std::pair<double, double>> points;  // (wavenumber, intensity)
    std::map<std::string, std::string> metadata;
};

struct Spectrum {
    std::vector<float> intensities;
    int class_id = -1;
    std::string sample_id;
    GridSpec grid;
};

struct Dataset {
    std::vector<Spectrum> spectra;
    std::map<int, std::vector<std::size_t>> class_index;
    std::map<int, std::string> class_names;

    void rebuild_index();
    std::size_t n_classes() const { return class_index.size(); }
};

// Resample onto a uniform grid by linear interpolation; out-of-span grid
// points clamp to the nearest endpoint value.
std::vector<float> resample(const RawSpectrum& raw, const GridSpec& grid);

std::vector<float> normalize_minmax(const std::vector<float>& v);

struct AugmentPolicy {
    int max_shift = 16;          // bins, shift drawn in [-max_shift, max_shift]
    double noise_sigma = 0.02;   // fraction of peak intensity
    double scale_lo = 0.9;
    double scale_hi = 1.1;

    bool is_identity() const {
        return max_shift == 0 && noise_sigma == 0.0 && scale_lo == 1.0 && scale_hi == 1.0;
    }
};

// Horizontal shift with zero padding (positive shift moves peaks right).
std::vector<float> shift_zero_pad(const std::vector<float>& v, int shift);

Spectrum augment(const Spectrum& s, const AugmentPolicy& policy, std::uint64_t rng_seed);

}  // namespace specmatch
