#pragma once

#include <string>
#include <vector>

#include "mftraffic/series.hpp"

namespace mftraffic {

/// Ordered set of moment orders q. May contain negative values and 0;
/// q = 0 selects the logarithmic-average branch of the estimators.
struct QGrid {
    std::vector<double> values;

    /// Inclusive arithmetic grid qmin, qmin+step, ..., qmax.
    static QGrid range(double qmin, double qmax, double step);

    void validate() const;  // strictly increasing, finite
    std::size_t size() const { return values.size(); }
};

/// Window sizes and detrending order for fluctuation analysis.
/// Invariants (checked against the series length N at estimation time):
/// scales strictly increasing, min >= detrend_order + 2, max <= N/4.
struct ScalePlan {
    std::vector<int> scales;
    int detrend_order = 2;

    /// 12 logarithmically spaced windows from 16 to n/4.
    static ScalePlan default_mfdfa(std::size_t n, int detrend_order = 2);

    void validate(std::size_t n) const;
};

/// Dyadic block sizes 4, 8, ..., up to n/64. Dyadic blocks keep cascade
/// block sums aligned with the construction's cells, and capping well below
/// n/4 keeps enough blocks per scale for stable log-moment regression.
std::vector<int> default_moment_scales(std::size_t n);

enum class EstimatorMethod { Mfdfa, Moments };

std::string method_name(EstimatorMethod m);
EstimatorMethod method_from_name(const std::string& name);

/// h(q) estimates with per-q regression diagnostics. Entries where
/// estimation failed carry defined = false and NaN in h/intercept/r2;
/// warnings lists the reasons.
struct HurstSpectrum {
    QGrid q;
    std::vector<double> h;
    std::vector<double> intercept;
    std::vector<double> r2;
    std::vector<bool> defined;
    EstimatorMethod method = EstimatorMethod::Mfdfa;
    std::vector<std::string> warnings;
};

/// Multifractal detrended fluctuation analysis.
///
/// 1. profile Y(i) = sum_{k<=i} (x_k - mean(x))
/// 2. per scale s: floor(N/s) non-overlapping segments from the start and
///    floor(N/s) from the end
/// 3. per segment: least-squares polynomial detrend of the given order,
///    F^2(v,s) = mean squared residual
/// 4. F_q(s) = (mean_v [F^2]^{q/2})^{1/q}; for q = 0 the log average
///    exp(mean_v ln F^2 / 2)
/// 5. h(q) = OLS slope of ln F_q(s) on ln s
///
/// A segment with F^2 = 0 makes every q < 0 (and q = 0) undefined for this
/// series; that q is marked, not a hard failure.
HurstSpectrum mfdfa(const Series& x, const QGrid& q, const ScalePlan& plan);

/// Direct moment (partition) method: x is read as an increment stream; for
/// each block size t, S_q(t) = mean over non-overlapping blocks of
/// |block sum|^q, and the OLS slope of ln S_q(t) on ln t is q*h(q).
/// h(0) is undefined by construction. A block summing to exactly 0 makes
/// q < 0 undefined.
HurstSpectrum moment_spectrum(const Series& x, const QGrid& q, const std::vector<int>& scales);

/// MFDFA with the default plan, evaluated at q = 2 only.
/// Throws DegenerateInputError if the estimate is undefined.
double hurst_h2(const Series& x);

/// Mean over grid points q in [q_min, q_max] of |a.h(q) - b.h(q)|.
/// Both spectra must share method and grid and be defined on the range.
double spectrum_deviation(const HurstSpectrum& a, const HurstSpectrum& b,
                          double q_min, double q_max);

}  // namespace mftraffic
