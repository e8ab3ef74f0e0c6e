#pragma once

#include <span>
#include <vector>

namespace mftraffic {

double mean(std::span<const double> x);

/// Sample variance, n-1 denominator, two-pass.
double variance(std::span<const double> x);

/// Sample autocovariance at the given lag, 1/n normalization.
double autocovariance(std::span<const double> x, std::size_t lag);

/// autocovariance(lag) / autocovariance(0).
double autocorrelation(std::span<const double> x, std::size_t lag);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

/// Ordinary least squares of y on x. A zero-variance y fits perfectly
/// (slope 0, r2 = 1); a zero-variance x is the caller's bug.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// log(sum(exp(l_i))) with the usual max shift; -inf entries contribute 0.
double logsumexp(std::span<const double> l);

}  // namespace mftraffic
