#pragma once

#include <cstdint>

#include "mftraffic/series.hpp"

namespace mftraffic {

/// Fractional Gaussian noise: n samples of the zero-mean, unit-variance
/// stationary Gaussian process with autocovariance
///   gamma(k) = ((k+1)^{2H} - 2 k^{2H} + |k-1|^{2H}) / 2.
/// Synthesis is exact in distribution via circulant embedding of the
/// covariance sequence (Davies-Harte), FFT size 2m >= 2n with m a power of
/// two. A negative circulant eigenvalue triggers embedding-size doubling
/// (bounded retries) before failing.
Series gen_fgn(std::size_t n, double hurst, std::uint64_t seed);

/// Fractional Brownian motion: cumulative sum of gen_fgn with the same seed.
Series gen_fbm(std::size_t n, double hurst, std::uint64_t seed);

/// Elementwise exponential. Output is strictly positive; log-normally
/// distributed (and long-range dependent) when the input is fGn. Throws
/// naming the offending index if exp() overflows.
Series exp_transform(const Series& x);

/// Conservative multiplicative binomial cascade with Beta(alpha, alpha)
/// weights: `depth` dyadic splits of a unit mass, each assigning fractions
/// W and 1-W to the children. Returns the 2^depth leaf masses scaled by
/// 2^depth, so the sample mean is 1.
Series gen_cascade(int depth, double alpha, std::uint64_t seed);

/// E[W^q] for W ~ Beta(alpha, alpha):
///   Gamma(2a) Gamma(a+q) / (Gamma(a) Gamma(2a+q)),  q > -alpha.
double beta_moment(double q, double alpha);

/// Analytic generalized Hurst exponent of the cascade above:
///   h(q) = -log2(E[W^q]) / q,
/// continued to q = 0 by a symmetric finite difference of log2 E[W^q].
/// Strictly decreasing in q; h(1) = 1 exactly.
double cascade_theoretical_h(double q, double alpha);

/// Stationary AR(1): x_i = phi x_{i-1} + eps_i, eps ~ N(0, sigma^2),
/// x_0 drawn from the stationary law N(0, sigma^2 / (1 - phi^2)).
Series gen_ar1(std::size_t n, double phi, double sigma, std::uint64_t seed);

/// Independent draws from the given marginal distribution.
Series gen_iid(std::size_t n, const DistSpec& dist, std::uint64_t seed);

/// Dispatch on a validated descriptor.
Series generate(const ModelDescriptor& d);

}  // namespace mftraffic
