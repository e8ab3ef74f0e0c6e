#pragma once

#include "mftraffic/series.hpp"

namespace mftraffic {

/// Target signal/noise variance ratio Var[signal] / Var[scaled noise].
struct MixSpec {
    double snr = 1.0;
};

struct MixResult {
    Series sum;
    double noise_scale = 1.0;   // factor c applied to the noise
    double achieved_snr = 0.0;  // Var[signal] / Var[c * noise], recomputed
};

/// Additive mix sum_i = multi_i + c * noise_i with
/// c = sqrt(Var[multi] / (snr * Var[noise])). The noise is scaled about
/// zero, not mean-centered, so positive noise stays positive. Sample
/// variances, n-1 denominator.
MixResult mix(const Series& multi, const Series& noise, const MixSpec& spec);

/// Sample-variance ratio Var[multi] / Var[noise_component].
double measure_snr(const Series& multi, const Series& noise_component);

}  // namespace mftraffic
