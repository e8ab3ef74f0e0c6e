#include "mftraffic/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mftraffic/errors.hpp"
#include "mftraffic/stats.hpp"

namespace mftraffic {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Least-squares polynomial detrender for one window size. The abscissa is
/// normalized to [-1,1] and the Gram matrix is factorized once per scale.
class PolyDetrender {
public:
    PolyDetrender(int s, int order) : s_(s), terms_(order + 1) {
        basis_.resize(static_cast<std::size_t>(s_) * terms_);
        for (int i = 0; i < s_; ++i) {
            const double u = s_ == 1 ? 0.0 : 2.0 * i / (s_ - 1.0) - 1.0;
            double p = 1.0;
            for (int j = 0; j < terms_; ++j) {
                basis_[static_cast<std::size_t>(i) * terms_ + j] = p;
                p *= u;
            }
        }
        // Cholesky of G = V^T V
        chol_.assign(static_cast<std::size_t>(terms_) * terms_, 0.0);
        std::vector<double> gram(static_cast<std::size_t>(terms_) * terms_, 0.0);
        for (int i = 0; i < s_; ++i) {
            const double* row = &basis_[static_cast<std::size_t>(i) * terms_];
            for (int a = 0; a < terms_; ++a) {
                for (int b = 0; b <= a; ++b) {
                    gram[static_cast<std::size_t>(a) * terms_ + b] += row[a] * row[b];
                }
            }
        }
        for (int a = 0; a < terms_; ++a) {
            for (int b = 0; b <= a; ++b) {
                double sum = gram[static_cast<std::size_t>(a) * terms_ + b];
                for (int k = 0; k < b; ++k) {
                    sum -= chol_[static_cast<std::size_t>(a) * terms_ + k] *
                           chol_[static_cast<std::size_t>(b) * terms_ + k];
                }
                if (a == b) {
                    if (sum <= 0.0) throw InternalError("detrend basis is rank deficient");
                    chol_[static_cast<std::size_t>(a) * terms_ + b] = std::sqrt(sum);
                } else {
                    chol_[static_cast<std::size_t>(a) * terms_ + b] =
                        sum / chol_[static_cast<std::size_t>(b) * terms_ + b];
                }
            }
        }
        coef_.resize(terms_);
    }

    /// Mean squared residual of the best polynomial fit to y (length s).
    double mean_sq_residual(const double* y) {
        // b = V^T y
        for (int j = 0; j < terms_; ++j) coef_[j] = 0.0;
        for (int i = 0; i < s_; ++i) {
            const double* row = &basis_[static_cast<std::size_t>(i) * terms_];
            for (int j = 0; j < terms_; ++j) coef_[j] += row[j] * y[i];
        }
        // solve L L^T c = b
        for (int a = 0; a < terms_; ++a) {
            double sum = coef_[a];
            for (int k = 0; k < a; ++k) {
                sum -= chol_[static_cast<std::size_t>(a) * terms_ + k] * coef_[k];
            }
            coef_[a] = sum / chol_[static_cast<std::size_t>(a) * terms_ + a];
        }
        for (int a = terms_ - 1; a >= 0; --a) {
            double sum = coef_[a];
            for (int k = a + 1; k < terms_; ++k) {
                sum -= chol_[static_cast<std::size_t>(k) * terms_ + a] * coef_[k];
            }
            coef_[a] = sum / chol_[static_cast<std::size_t>(a) * terms_ + a];
        }
        double rss = 0.0;
        for (int i = 0; i < s_; ++i) {
            const double* row = &basis_[static_cast<std::size_t>(i) * terms_];
            double fit = 0.0;
            for (int j = 0; j < terms_; ++j) fit += coef_[j] * row[j];
            const double r = y[i] - fit;
            rss += r * r;
        }
        return rss / s_;
    }

private:
    int s_;
    int terms_;
    std::vector<double> basis_;
    std::vector<double> chol_;
    std::vector<double> coef_;
};

struct ScaleStats {
    int scale = 0;
    std::vector<double> log_sq;  // per segment/block: ln F^2 or 2 ln|sum|
    bool has_zero = false;       // some segment/block collapsed to exactly 0
};

/// ln of the generalized mean ((1/V) sum (F^2)^{q/2})^{1/q}, in log space.
/// Returns NaN when the value is undefined for this q.
double log_fq(const ScaleStats& st, double q) {
    const auto& l = st.log_sq;
    if (q == 0.0) {
        if (st.has_zero) return kNan;
        double s = 0.0;
        for (double v : l) s += v;
        return 0.5 * s / static_cast<double>(l.size());
    }
    if (q < 0.0 && st.has_zero) return kNan;
    std::vector<double> terms(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) terms[i] = 0.5 * q * l[i];
    const double lse = logsumexp(terms);
    if (lse == kNegInf) return kNan;  // every segment collapsed
    return (lse - std::log(static_cast<double>(l.size()))) / q;
}

HurstSpectrum fit_spectrum(const std::vector<ScaleStats>& per_scale, const QGrid& q,
                           EstimatorMethod method, bool moment_mode) {
    HurstSpectrum spec;
    spec.q = q;
    spec.method = method;
    const std::size_t nq = q.size();
    spec.h.assign(nq, kNan);
    spec.intercept.assign(nq, kNan);
    spec.r2.assign(nq, kNan);
    spec.defined.assign(nq, false);

    std::vector<double> log_s(per_scale.size());
    for (std::size_t i = 0; i < per_scale.size(); ++i) {
        log_s[i] = std::log(static_cast<double>(per_scale[i].scale));
    }

    std::vector<double> log_f(per_scale.size());
    for (std::size_t iq = 0; iq < nq; ++iq) {
        const double qv = q.values[iq];
        if (moment_mode && qv == 0.0) {
            spec.warnings.push_back("q=0: undefined in the moment method (slope/q)");
            continue;
        }
        bool ok = true;
        for (std::size_t i = 0; i < per_scale.size(); ++i) {
            double lf = log_fq(per_scale[i], qv);
            if (moment_mode) {
                lf *= qv;  // moment regression is on ln S_q = q ln(mean^{1/q})
            }
            if (!std::isfinite(lf)) {
                ok = false;
                break;
            }
            log_f[i] = lf;
        }
        if (!ok) {
            spec.warnings.push_back("q=" + std::to_string(qv) +
                                    ": zero fluctuation encountered, estimate undefined");
            continue;
        }
        const LineFit f = fit_line(log_s, log_f);
        spec.h[iq] = moment_mode ? f.slope / qv : f.slope;
        spec.intercept[iq] = f.intercept;
        spec.r2[iq] = f.r2;
        spec.defined[iq] = true;
    }
    return spec;
}

}  // namespace

QGrid QGrid::range(double qmin, double qmax, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ParameterError("q step must be > 0");
    }
    if (!(qmax >= qmin)) {
        throw ParameterError("q range requires qmax >= qmin");
    }
    QGrid g;
    const auto count = static_cast<std::size_t>((qmax - qmin) / step + 1e-9) + 1;
    g.values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        g.values.push_back(qmin + static_cast<double>(i) * step);
    }
    g.validate();
    return g;
}

void QGrid::validate() const {
    if (values.empty()) throw ParameterError("q grid is empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw ParameterError("q grid contains a non-finite value");
        if (i > 0 && !(values[i] > values[i - 1])) {
            throw ParameterError("q grid must be strictly increasing");
        }
    }
}

ScalePlan ScalePlan::default_mfdfa(std::size_t n, int detrend_order) {
    if (n < 64) {
        throw SizeError("series too short for the default plan (need length >= 64)");
    }
    const double lo = std::log(16.0);
    const double hi = std::log(static_cast<double>(n) / 4.0);
    ScalePlan plan;
    plan.detrend_order = detrend_order;
    for (int i = 0; i < 12; ++i) {
        const double t = lo + (hi - lo) * i / 11.0;
        const int s = static_cast<int>(std::lround(std::exp(t)));
        if (plan.scales.empty() || s > plan.scales.back()) {
            plan.scales.push_back(s);
        }
    }
    return plan;
}

void ScalePlan::validate(std::size_t n) const {
    if (detrend_order < 0 || detrend_order > 8) {
        throw ParameterError("detrend order must be in [0, 8]");
    }
    if (scales.size() < 2) {
        throw ParameterError("scale plan needs at least two scales");
    }
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (i > 0 && scales[i] <= scales[i - 1]) {
            throw ParameterError("scales must be strictly increasing");
        }
    }
    if (scales.front() < detrend_order + 2) {
        throw ParameterError("minimum scale must be >= detrend_order + 2");
    }
    if (static_cast<std::size_t>(scales.back()) > n / 4) {
        throw SizeError("maximum scale exceeds length/4");
    }
    if (n < 4 * static_cast<std::size_t>(scales.front())) {
        throw SizeError("series shorter than 4x the minimum scale");
    }
}

std::vector<int> default_moment_scales(std::size_t n) {
    std::vector<int> scales;
    const std::size_t cap = std::min(std::max<std::size_t>(8, n / 64), n / 4);
    for (std::size_t t = 4; t <= cap; t *= 2) {
        scales.push_back(static_cast<int>(t));
    }
    return scales;
}

std::string method_name(EstimatorMethod m) {
    return m == EstimatorMethod::Mfdfa ? "mfdfa" : "moments";
}

EstimatorMethod method_from_name(const std::string& name) {
    if (name == "mfdfa") return EstimatorMethod::Mfdfa;
    if (name == "moments") return EstimatorMethod::Moments;
    throw ParameterError("unknown method '" + name + "' (expected mfdfa or moments)");
}

HurstSpectrum mfdfa(const Series& x, const QGrid& q, const ScalePlan& plan) {
    q.validate();
    plan.validate(x.size());
    const std::size_t n = x.size();

    // profile of the mean-centered increments
    const double m = mean(x.values);
    std::vector<double> profile(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += x.values[i] - m;
        profile[i] = acc;
    }

    std::vector<ScaleStats> per_scale;
    per_scale.reserve(plan.scales.size());
    for (int s : plan.scales) {
        PolyDetrender detrender(s, plan.detrend_order);
        const std::size_t segs = n / static_cast<std::size_t>(s);
        ScaleStats st;
        st.scale = s;
        st.log_sq.reserve(2 * segs);
        auto push_segment = [&](std::size_t begin) {
            const double f2 = detrender.mean_sq_residual(&profile[begin]);
            if (f2 <= 0.0) {
                st.has_zero = true;
                st.log_sq.push_back(kNegInf);
            } else {
                st.log_sq.push_back(std::log(f2));
            }
        };
        for (std::size_t v = 0; v < segs; ++v) push_segment(v * s);
        for (std::size_t v = 0; v < segs; ++v) push_segment(n - (v + 1) * s);
        per_scale.push_back(std::move(st));
    }
    return fit_spectrum(per_scale, q, EstimatorMethod::Mfdfa, /*moment_mode=*/false);
}

HurstSpectrum moment_spectrum(const Series& x, const QGrid& q, const std::vector<int>& scales) {
    q.validate();
    const std::size_t n = x.size();
    if (scales.size() < 2) {
        throw ParameterError("moment method needs at least two block sizes");
    }
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (scales[i] < 1) throw ParameterError("block sizes must be >= 1");
        if (i > 0 && scales[i] <= scales[i - 1]) {
            throw ParameterError("block sizes must be strictly increasing");
        }
    }
    if (static_cast<std::size_t>(scales.back()) > n / 4) {
        throw SizeError("maximum block size exceeds length/4");
    }

    std::vector<ScaleStats> per_scale;
    per_scale.reserve(scales.size());
    for (int t : scales) {
        const std::size_t blocks = n / static_cast<std::size_t>(t);
        ScaleStats st;
        st.scale = t;
        st.log_sq.reserve(blocks);
        for (std::size_t v = 0; v < blocks; ++v) {
            double sum = 0.0;
            const std::size_t begin = v * static_cast<std::size_t>(t);
            for (std::size_t i = 0; i < static_cast<std::size_t>(t); ++i) {
                sum += x.values[begin + i];
            }
            const double a = std::fabs(sum);
            if (a == 0.0) {
                st.has_zero = true;
                st.log_sq.push_back(kNegInf);
            } else {
                st.log_sq.push_back(2.0 * std::log(a));  // keep the F^2 convention
            }
        }
        per_scale.push_back(std::move(st));
    }
    return fit_spectrum(per_scale, q, EstimatorMethod::Moments, /*moment_mode=*/true);
}

double hurst_h2(const Series& x) {
    QGrid g;
    g.values = {2.0};
    const HurstSpectrum s = mfdfa(x, g, ScalePlan::default_mfdfa(x.size()));
    if (!s.defined[0]) {
        throw DegenerateInputError("h(2) undefined: " +
                                   (s.warnings.empty() ? std::string("no fluctuations")
                                                       : s.warnings.front()));
    }
    return s.h[0];
}

double spectrum_deviation(const HurstSpectrum& a, const HurstSpectrum& b, double q_min,
                          double q_max) {
    if (a.method != b.method) {
        throw ContractError("spectrum_deviation: methods differ");
    }
    if (a.q.values != b.q.values) {
        throw ContractError("spectrum_deviation: q grids differ");
    }
    if (!(q_min <= q_max)) {
        throw ParameterError("spectrum_deviation: q_min must be <= q_max");
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < a.q.size(); ++i) {
        const double qv = a.q.values[i];
        if (qv < q_min - 1e-12 || qv > q_max + 1e-12) continue;
        if (!a.defined[i] || !b.defined[i]) {
            throw ContractError("spectrum_deviation: spectrum undefined at q=" +
                                std::to_string(qv));
        }
        sum += std::fabs(a.h[i] - b.h[i]);
        ++count;
    }
    if (count == 0) {
        throw DomainError("spectrum_deviation: no grid points in [q_min, q_max]");
    }
    return sum / static_cast<double>(count);
}

}  // namespace mftraffic
