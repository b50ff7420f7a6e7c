#include "specmatch/synth.hpp"

#include <cmath>
#include <vector>

#include "specmatch/rng.hpp"

namespace specmatch {

namespace {

struct Peak {
    double center;  // bin index (fractional)
    double width;   // bins
    double height;
};

}  // namespace

Dataset synth_dataset(const SynthConfig& cfg, std::uint64_t rng_seed) {
    Rng class_rng(mix_seed(rng_seed, 0));
    Rng sample_rng(mix_seed(rng_seed, 1));
    const int L = cfg.grid.length;

    Dataset ds;
    for (int c = 0; c < cfg.n_classes; ++c) {
        int n_peaks = cfg.peak_count_range.first +
                      static_cast<int>(class_rng.uniform_int(
                          cfg.peak_count_range.second - cfg.peak_count_range.first + 1));
        std::vector<Peak> peaks(n_peaks);
        for (auto& p : peaks) {
            p.center = class_rng.uniform(0.05 * L, 0.95 * L);
            p.width = class_rng.uniform(2.0, 8.0);
            p.height = class_rng.uniform(0.3, 1.0);
        }

        std::vector<float> clean(L, 0.0f);
        for (int i = 0; i < L; ++i) {
            double v = 0.0;
            for (const auto& p : peaks) {
                double d = (i - p.center) / p.width;
                v += p.height * std::exp(-0.5 * d * d);
            }
            clean[i] = static_cast<float>(v);
        }

        for (int s = 0; s < cfg.samples_per_class; ++s) {
            std::vector<float> y = clean;
            if (cfg.baseline_degree > 0 && cfg.baseline_amplitude > 0.0) {
                std::vector<double> coeff(cfg.baseline_degree + 1);
                for (auto& a : coeff) a = sample_rng.normal();
                double amp = cfg.baseline_amplitude * sample_rng.uniform(0.5, 1.5);
                // evaluate on t in [-1, 1], then rescale to |baseline| <= amp
                std::vector<double> base(L);
                double peak_abs = 0.0;
                for (int i = 0; i < L; ++i) {
                    double t = 2.0 * i / (L - 1) - 1.0;
                    double v = 0.0;
                    for (int d = cfg.baseline_degree; d >= 0; --d) v = v * t + coeff[d];
                    base[i] = v;
                    peak_abs = std::max(peak_abs, std::abs(v));
                }
                if (peak_abs > 0.0)
                    for (int i = 0; i < L; ++i)
                        y[i] += static_cast<float>(base[i] * amp / peak_abs);
            }
            if (cfg.noise_sigma > 0.0)
                for (auto& v : y)
                    v += static_cast<float>(sample_rng.normal(0.0, cfg.noise_sigma));

            Spectrum sp;
            sp.intensities = normalize_minmax(y);
            sp.class_id = c;
            sp.sample_id = "synth-" + std::to_string(c) + "-" + std::to_string(s);
            sp.grid = cfg.grid;
            ds.spectra.push_back(std::move(sp));
        }
        ds.class_names[c] = "class-" + std::to_string(c);
    }
    ds.rebuild_index();
    return ds;
}

}  // namespace specmatch
