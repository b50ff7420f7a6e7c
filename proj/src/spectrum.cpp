#include "specmatch/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "specmatch/errors.hpp"
#include "specmatch/rng.hpp"

namespace specmatch {

void Dataset::rebuild_index() {
    class_index.clear();
    for (std::size_t i = 0; i < spectra.size(); ++i)
        class_index[spectra[i].class_id].push_back(i);
}

std::vector<float> resample(const RawSpectrum& raw, const GridSpec& grid) {
    if (grid.length < 2 || grid.start >= grid.end)
        throw InvalidGrid("need L >= 2 and start < end");
    const auto& pts = raw.points;
    std::vector<float> out(grid.length);
    std::size_t seg = 0;  // pts are strictly increasing in wavenumber
    for (int i = 0; i < grid.length; ++i) {
        double x = grid.point(i);
        if (x <= pts.front().first) {
            out[i] = static_cast<float>(pts.front().second);
            continue;
        }
        if (x >= pts.back().first) {
            out[i] = static_cast<float>(pts.back().second);
            continue;
        }
        while (seg + 2 < pts.size() && pts[seg + 1].first < x) ++seg;
        double x0 = pts[seg].first, x1 = pts[seg + 1].first;
        double y0 = pts[seg].second, y1 = pts[seg + 1].second;
        double t = (x - x0) / (x1 - x0);
        out[i] = static_cast<float>(y0 + t * (y1 - y0));
    }
    return out;
}

std::vector<float> normalize_minmax(const std::vector<float>& v) {
    for (float x : v)
        if (!std::isfinite(x)) throw NonFiniteInput();
    auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    float mn = *mn_it, mx = *mx_it;
    std::vector<float> out(v.size());
    if (mx == mn) return out;  // constant maps to zeros
    // divide (not multiply by reciprocal) so the extremes land exactly on 0
    // and 1 and the map is idempotent
    float range = mx - mn;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mn) / range;
    return out;
}

std::vector<float> shift_zero_pad(const std::vector<float>& v, int shift) {
    const int L = static_cast<int>(v.size());
    std::vector<float> out(v.size(), 0.0f);
    for (int i = 0; i < L; ++i) {
        int j = i - shift;
        if (j >= 0 && j < L) out[i] = v[j];
    }
    return out;
}

Spectrum augment(const Spectrum& s, const AugmentPolicy& policy, std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    Spectrum out = s;
    auto& y = out.intensities;

    int shift = 0;
    if (policy.max_shift > 0)
        shift = static_cast<int>(rng.uniform_int(2 * policy.max_shift + 1)) - policy.max_shift;
    if (shift != 0) y = shift_zero_pad(y, shift);

    double scale = 1.0;
    if (policy.scale_lo != 1.0 || policy.scale_hi != 1.0)
        scale = rng.uniform(policy.scale_lo, policy.scale_hi);

    bool perturbed = policy.noise_sigma > 0.0 || scale != 1.0;
    if (perturbed) {
        float peak = *std::max_element(y.begin(), y.end());
        double sigma = policy.noise_sigma * peak;
        for (auto& v : y)
            v = static_cast<float>(v * scale + (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0));
        y = normalize_minmax(y);
    }
    return out;
}

}  // namespace specmatch
