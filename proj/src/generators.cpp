#include "mftraffic/generators.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "mftraffic/errors.hpp"
#include "mftraffic/fft.hpp"
#include "mftraffic/rng.hpp"

namespace mftraffic {

namespace {

/// Theoretical fGn autocovariance at lag k for unit variance.
double fgn_gamma(double k, double hurst) {
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(std::fabs(k + 1.0), h2) - 2.0 * std::pow(std::fabs(k), h2) +
                  std::pow(std::fabs(k - 1.0), h2));
}

/// One circulant-embedding attempt with half-size m (power of two, >= n).
/// Returns false if the embedding has a genuinely negative eigenvalue.
bool try_davies_harte(std::size_t n, double hurst, Rng& rng, std::vector<double>& out,
                      std::size_t m) {
    const std::size_t len = 2 * m;
    std::vector<std::complex<double>> c(len);
    for (std::size_t j = 0; j <= m; ++j) {
        c[j] = fgn_gamma(static_cast<double>(j), hurst);
    }
    for (std::size_t j = 1; j < m; ++j) {
        c[len - j] = c[j];
    }
    detail::fft(c);

    double max_eig = 0.0;
    for (const auto& e : c) max_eig = std::max(max_eig, e.real());
    std::vector<double> eig(len);
    for (std::size_t k = 0; k < len; ++k) {
        const double lam = c[k].real();
        if (lam < -1e-8 * max_eig) return false;
        eig[k] = lam < 0.0 ? 0.0 : lam;  // clear rounding dust
    }

    std::vector<std::complex<double>> y(len);
    y[0] = std::sqrt(eig[0]) * rng.gaussian();
    for (std::size_t k = 1; k < m; ++k) {
        const double u = rng.gaussian();
        const double v = rng.gaussian();
        const double s = std::sqrt(eig[k] * 0.5);
        y[k] = std::complex<double>(s * u, s * v);
        y[len - k] = std::conj(y[k]);
    }
    y[m] = std::sqrt(eig[m]) * rng.gaussian();

    detail::fft(y);
    const double norm = 1.0 / std::sqrt(static_cast<double>(len));
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = y[i].real() * norm;
    }
    return true;
}

void check_fgn_args(std::size_t n, double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw ParameterError("hurst must be in (0,1), got " + std::to_string(hurst));
    }
    if (n < 2) {
        throw ParameterError("series length must be >= 2");
    }
}

}  // namespace

Series gen_fgn(std::size_t n, double hurst, std::uint64_t seed) {
    check_fgn_args(n, hurst);
    Rng rng(seed);
    std::vector<double> values;
    std::size_t m = detail::next_power_of_two(n);
    for (int attempt = 0; attempt < 4; ++attempt, m *= 2) {
        if (try_davies_harte(n, hurst, rng, values, m)) {
            ModelDescriptor d;
            d.model = Model::Fgn;
            d.hurst = hurst;
            d.n = n;
            d.seed = seed;
            return Series{std::move(values), d};
        }
    }
    throw InternalError("circulant embedding stayed indefinite after size doubling");
}

Series gen_fbm(std::size_t n, double hurst, std::uint64_t seed) {
    Series s = gen_fgn(n, hurst, seed);
    double acc = 0.0;
    for (auto& v : s.values) {
        acc += v;
        v = acc;
    }
    s.meta->model = Model::Fbm;
    return s;
}

Series exp_transform(const Series& x) {
    Series out;
    out.values.reserve(x.values.size());
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        if (!std::isfinite(x.values[i])) {
            throw ParameterError("exp_transform: input not finite at index " + std::to_string(i));
        }
        const double v = std::exp(x.values[i]);
        if (!std::isfinite(v)) {
            throw ParameterError("exp_transform: overflow at index " + std::to_string(i));
        }
        out.values.push_back(v);
    }
    if (x.meta && x.meta->model == Model::Fgn) {
        out.meta = x.meta;
        out.meta->model = Model::ExpFgn;
    }
    return out;
}

Series gen_cascade(int depth, double alpha, std::uint64_t seed) {
    if (depth < 1 || depth > 24) {
        throw ParameterError("cascade depth must be in [1, 24], got " + std::to_string(depth));
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ParameterError("cascade alpha must be > 0");
    }
    Rng rng(seed);
    std::vector<double> mass{1.0};
    for (int level = 0; level < depth; ++level) {
        std::vector<double> next(mass.size() * 2);
        for (std::size_t i = 0; i < mass.size(); ++i) {
            const double w = rng.beta_symmetric(alpha);
            next[2 * i] = mass[i] * w;
            next[2 * i + 1] = mass[i] * (1.0 - w);
        }
        mass.swap(next);
    }
    const double scale = static_cast<double>(std::size_t{1} << depth);
    for (auto& v : mass) v *= scale;

    ModelDescriptor d;
    d.model = Model::Cascade;
    d.alpha = alpha;
    d.depth = depth;
    d.n = mass.size();
    d.seed = seed;
    return Series{std::move(mass), d};
}

double beta_moment(double q, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ParameterError("alpha must be > 0");
    }
    if (!(q > -alpha)) {
        throw DomainError("beta moment requires q > -alpha");
    }
    return std::exp(std::lgamma(2.0 * alpha) + std::lgamma(alpha + q) - std::lgamma(alpha) -
                    std::lgamma(2.0 * alpha + q));
}

double cascade_theoretical_h(double q, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ParameterError("alpha must be > 0");
    }
    if (!(q > -alpha)) {
        throw DomainError("cascade h(q) requires q > -alpha");
    }
    if (q == 0.0) {
        // limit -d/dq log2 E[W^q] at 0, symmetric difference
        const double eps = std::min(1e-5, alpha / 2.0);
        const double up = std::log2(beta_moment(eps, alpha));
        const double dn = std::log2(beta_moment(-eps, alpha));
        return -(up - dn) / (2.0 * eps);
    }
    return -std::log2(beta_moment(q, alpha)) / q;
}

Series gen_ar1(std::size_t n, double phi, double sigma, std::uint64_t seed) {
    if (!(std::fabs(phi) < 1.0)) {
        throw ParameterError("ar1 phi must satisfy |phi| < 1 (stationarity), got " +
                             std::to_string(phi));
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ParameterError("ar1 sigma must be > 0");
    }
    if (n < 2) {
        throw ParameterError("series length must be >= 2");
    }
    Rng rng(seed);
    std::vector<double> values(n);
    values[0] = sigma / std::sqrt(1.0 - phi * phi) * rng.gaussian();
    for (std::size_t i = 1; i < n; ++i) {
        values[i] = phi * values[i - 1] + sigma * rng.gaussian();
    }
    ModelDescriptor d;
    d.model = Model::Ar1;
    d.phi = phi;
    d.sigma = sigma;
    d.n = n;
    d.seed = seed;
    return Series{std::move(values), d};
}

Series gen_iid(std::size_t n, const DistSpec& dist, std::uint64_t seed) {
    dist.validate();
    if (n < 2) {
        throw ParameterError("series length must be >= 2");
    }
    Rng rng(seed);
    std::vector<double> values(n);
    switch (dist.kind) {
        case Dist::Uniform:
            for (auto& v : values) v = rng.uniform(dist.p1, dist.p2);
            break;
        case Dist::Normal:
            for (auto& v : values) v = dist.p1 + dist.p2 * rng.gaussian();
            break;
        case Dist::Lognormal:
            for (auto& v : values) v = std::exp(dist.p1 + dist.p2 * rng.gaussian());
            break;
    }
    ModelDescriptor d;
    d.model = Model::Iid;
    d.dist = dist;
    d.n = n;
    d.seed = seed;
    return Series{std::move(values), d};
}

Series generate(const ModelDescriptor& d) {
    d.validate();
    switch (d.model) {
        case Model::Fgn:
            return gen_fgn(d.n, *d.hurst, d.seed);
        case Model::Fbm:
            return gen_fbm(d.n, *d.hurst, d.seed);
        case Model::ExpFgn:
            return exp_transform(gen_fgn(d.n, *d.hurst, d.seed));
        case Model::Cascade:
            return gen_cascade(*d.depth, *d.alpha, d.seed);
        case Model::Ar1:
            return gen_ar1(d.n, *d.phi, *d.sigma, d.seed);
        case Model::Iid:
            return gen_iid(d.n, *d.dist, d.seed);
    }
    throw InternalError("unknown model enum");
}

}  // namespace mftraffic
