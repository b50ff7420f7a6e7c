#pragma once

#include <vector>

#include "specmatch/spectrum.hpp"

namespace specmatch {

struct AslsConfig {
    double lambda = 1e5;  // smoothness weight
    double p = 1e-3;      // asymmetry, in (0,1)
    int max_iter = 20;

    void validate() const;
};

// Asymmetric least squares baseline: minimizes sum_i w_i (y_i - z_i)^2 +
// lambda * sum_i (d2 z_i)^2 with w_i = p above the fit and 1-p below,
// iterated from w = 1 until no weight flips or max_iter. The inner solve is
// an exact pentadiagonal Cholesky, O(L) per iteration.
std::vector<double> asls_baseline(const std::vector<double>& y, const AslsConfig& cfg);

// Subtracts the AsLS baseline and re-normalizes; labels preserved.
Spectrum asls_correct(const Spectrum& s, const AslsConfig& cfg);

Dataset asls_correct_dataset(const Dataset& ds, const AslsConfig& cfg);

}  // namespace specmatch
