#include "specmatch/asls.hpp"

#include <cmath>

#include "specmatch/errors.hpp"

namespace specmatch {

void AslsConfig::validate() const {
    if (!(lambda > 0.0)) throw ConfigError("asls lambda must be > 0");
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("asls p must be in (0,1)");
    if (max_iter < 1) throw ConfigError("asls max_iter must be >= 1");
}

namespace {

// Solves (diag(w) + lambda * D2' D2) z = diag(w) y for the pentadiagonal
// system arising from the second-difference penalty.
std::vector<double> penalized_solve(const std::vector<double>& y,
                                    const std::vector<double>& w, double lambda) {
    const int n = static_cast<int>(y.size());
    std::vector<double> d0(n, 0.0), d1(n, 0.0), d2(n, 0.0);
    for (int i = 0; i < n; ++i) d0[i] = w[i];
    // accumulate lambda * D2' D2, stencil (1, -2, 1) per difference row
    for (int j = 0; j + 2 < n; ++j) {
        d0[j] += lambda;
        d0[j + 1] += 4.0 * lambda;
        d0[j + 2] += lambda;
        d1[j] += -2.0 * lambda;
        d1[j + 1] += -2.0 * lambda;
        d2[j] += lambda;
    }

    // banded Cholesky, bandwidth 2: A = L L', bands l0 (diag), l1, l2
    std::vector<double> l0(n), l1(n, 0.0), l2(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = d0[i];
        if (i >= 1) s -= l1[i - 1] * l1[i - 1];
        if (i >= 2) s -= l2[i - 2] * l2[i - 2];
        if (!(s > 0.0)) throw SolveFailure();
        l0[i] = std::sqrt(s);
        if (i + 1 < n) {
            double t = d1[i];
            if (i >= 1) t -= l1[i - 1] * l2[i - 1];
            l1[i] = t / l0[i];
        }
        if (i + 2 < n) l2[i] = d2[i] / l0[i];
    }

    // forward substitution L u = diag(w) y
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) {
        double s = w[i] * y[i];
        if (i >= 1) s -= l1[i - 1] * u[i - 1];
        if (i >= 2) s -= l2[i - 2] * u[i - 2];
        u[i] = s / l0[i];
    }
    // back substitution L' z = u
    std::vector<double> z(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = u[i];
        if (i + 1 < n) s -= l1[i] * z[i + 1];
        if (i + 2 < n) s -= l2[i] * z[i + 2];
        z[i] = s / l0[i];
    }
    return z;
}

}  // namespace

std::vector<double> asls_baseline(const std::vector<double>& y, const AslsConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(y.size());
    if (n < 3) throw InvalidGrid("asls needs at least 3 points");
    for (double v : y)
        if (!std::isfinite(v)) throw NonFiniteInput();

    // Solve in deviations from the least-squares line: lines are in the
    // penalty null space, so this keeps constants and ramps exact fixed
    // points instead of losing ~lambda/eps digits to conditioning.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += i;
        sy += y[i];
        sxx += static_cast<double>(i) * i;
        sxy += i * y[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    std::vector<double> line(n), dev(n);
    for (int i = 0; i < n; ++i) {
        line[i] = intercept + slope * i;
        dev[i] = y[i] - line[i];
    }

    std::vector<double> w(n, 1.0);
    std::vector<double> z(n);
    for (int it = 0; it < cfg.max_iter; ++it) {
        std::vector<double> d = penalized_solve(dev, w, cfg.lambda);
        for (int i = 0; i < n; ++i) z[i] = d[i] + line[i];
        bool flipped = false;
        for (int i = 0; i < n; ++i) {
            double wi = y[i] > z[i] ? cfg.p : 1.0 - cfg.p;
            if (wi != w[i]) {
                w[i] = wi;
                flipped = true;
            }
        }
        if (!flipped) break;
    }
    return z;
}

Spectrum asls_correct(const Spectrum& s, const AslsConfig& cfg) {
    std::vector<double> y(s.intensities.begin(), s.intensities.end());
    std::vector<double> z = asls_baseline(y, cfg);
    std::vector<float> corrected(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        corrected[i] = static_cast<float>(y[i] - z[i]);
    Spectrum out = s;
    out.intensities = normalize_minmax(corrected);
    return out;
}

Dataset asls_correct_dataset(const Dataset& ds, const AslsConfig& cfg) {
    Dataset out;
    out.class_names = ds.class_names;
    out.spectra.reserve(ds.spectra.size());
    for (const auto& s : ds.spectra) out.spectra.push_back(asls_correct(s, cfg));
    out.rebuild_index();
    return out;
}

}  // namespace specmatch
