#include "mftraffic/stats.hpp"

#include <cmath>
#include <limits>

#include "mftraffic/errors.hpp"

namespace mftraffic {

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) {
        const double d = v - m;
        s += d * d;
    }
    return s / static_cast<double>(x.size() - 1);
}

double autocovariance(std::span<const double> x, std::size_t lag) {
    if (x.size() <= lag) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (std::size_t i = 0; i + lag < x.size(); ++i) {
        s += (x[i] - m) * (x[i + lag] - m);
    }
    return s / static_cast<double>(x.size());
}

double autocorrelation(std::span<const double> x, std::size_t lag) {
    const double c0 = autocovariance(x, 0);
    if (c0 == 0.0) return 0.0;
    return autocovariance(x, lag) / c0;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ContractError("fit_line: need two equal-length samples of size >= 2");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) {
        throw ContractError("fit_line: zero variance in x");
    }
    LineFit f;
    if (syy == 0.0) {
        f.slope = 0.0;
        f.intercept = my;
        f.r2 = 1.0;
        return f;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        sse += r * r;
    }
    f.r2 = 1.0 - sse / syy;
    if (f.r2 < 0.0) f.r2 = 0.0;
    if (f.r2 > 1.0) f.r2 = 1.0;
    return f;
}

double logsumexp(std::span<const double> l) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : l) {
        if (v > mx) mx = v;
    }
    if (!std::isfinite(mx)) return mx;  // all -inf (or an inf/nan poisoned set)
    double s = 0.0;
    for (double v : l) {
        if (v == -std::numeric_limits<double>::infinity()) continue;
        s += std::exp(v - mx);
    }
    return mx + std::log(s);
}

}  // namespace mftraffic
