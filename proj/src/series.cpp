#include "mftraffic/series.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "mftraffic/errors.hpp"

namespace mftraffic {

namespace {

constexpr int kMaxCascadeDepth = 24;  // 2^24 doubles = 128 MiB

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw ParameterError(msg);
}

}  // namespace

void DistSpec::validate() const {
    switch (kind) {
        case Dist::Uniform:
            require(std::isfinite(p1) && std::isfinite(p2) && p1 < p2,
                    "uniform distribution requires lo < hi");
            break;
        case Dist::Normal:
            require(std::isfinite(p1) && std::isfinite(p2) && p2 > 0.0,
                    "normal distribution requires stdev > 0");
            break;
        case Dist::Lognormal:
            require(std::isfinite(p1) && std::isfinite(p2) && p2 > 0.0,
                    "lognormal distribution requires sigma > 0");
            break;
    }
}

void ModelDescriptor::validate() const {
    const bool needs_hurst = model == Model::Fgn || model == Model::Fbm || model == Model::ExpFgn;
    require(hurst.has_value() == needs_hurst,
            needs_hurst ? "model requires hurst" : "hurst is not a parameter of this model");
    if (hurst) {
        require(*hurst > 0.0 && *hurst < 1.0, "hurst must be in (0,1)");
    }

    const bool is_cascade = model == Model::Cascade;
    require(alpha.has_value() == is_cascade,
            is_cascade ? "cascade requires alpha" : "alpha is not a parameter of this model");
    require(depth.has_value() == is_cascade,
            is_cascade ? "cascade requires depth" : "depth is not a parameter of this model");
    if (is_cascade) {
        require(std::isfinite(*alpha) && *alpha > 0.0, "alpha must be > 0");
        require(*depth >= 1 && *depth <= kMaxCascadeDepth,
                "depth must be in [1, " + std::to_string(kMaxCascadeDepth) + "]");
        require(n == (std::size_t{1} << *depth), "cascade length must equal 2^depth");
    }

    const bool is_ar1 = model == Model::Ar1;
    require(phi.has_value() == is_ar1,
            is_ar1 ? "ar1 requires phi" : "phi is not a parameter of this model");
    require(sigma.has_value() == is_ar1,
            is_ar1 ? "ar1 requires sigma" : "sigma is not a parameter of this model");
    if (is_ar1) {
        require(std::isfinite(*phi) && std::fabs(*phi) < 1.0,
                "phi must be in (-1,1) for a stationary ar1");
        require(std::isfinite(*sigma) && *sigma > 0.0, "sigma must be > 0");
    }

    const bool is_iid = model == Model::Iid;
    require(dist.has_value() == is_iid,
            is_iid ? "iid requires dist" : "dist is not a parameter of this model");
    if (dist) dist->validate();

    require(n >= 2, "series length must be >= 2");
}

std::string model_name(Model m) {
    switch (m) {
        case Model::Fgn: return "fgn";
        case Model::Fbm: return "fbm";
        case Model::ExpFgn: return "exp-fgn";
        case Model::Cascade: return "cascade";
        case Model::Ar1: return "ar1";
        case Model::Iid: return "iid";
    }
    throw InternalError("unknown model enum");
}

Model model_from_name(const std::string& name) {
    if (name == "fgn") return Model::Fgn;
    if (name == "fbm") return Model::Fbm;
    if (name == "exp-fgn") return Model::ExpFgn;
    if (name == "cascade") return Model::Cascade;
    if (name == "ar1") return Model::Ar1;
    if (name == "iid") return Model::Iid;
    throw ParameterError("unknown model '" + name +
                         "' (expected fgn, fbm, exp-fgn, cascade, ar1, iid)");
}

std::string dist_name(Dist d) {
    switch (d) {
        case Dist::Uniform: return "uniform";
        case Dist::Normal: return "normal";
        case Dist::Lognormal: return "lognormal";
    }
    throw InternalError("unknown dist enum");
}

Dist dist_from_name(const std::string& name) {
    if (name == "uniform") return Dist::Uniform;
    if (name == "normal") return Dist::Normal;
    if (name == "lognormal") return Dist::Lognormal;
    throw ParameterError("unknown distribution '" + name +
                         "' (expected uniform, normal, lognormal)");
}

std::vector<std::pair<std::string, std::string>> descriptor_to_kv(const ModelDescriptor& d) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("model", model_name(d.model));
    kv.emplace_back("n", std::to_string(d.n));
    kv.emplace_back("seed", std::to_string(d.seed));
    if (d.hurst) kv.emplace_back("hurst", fmt17(*d.hurst));
    if (d.alpha) kv.emplace_back("alpha", fmt17(*d.alpha));
    if (d.depth) kv.emplace_back("depth", std::to_string(*d.depth));
    if (d.phi) kv.emplace_back("phi", fmt17(*d.phi));
    if (d.sigma) kv.emplace_back("sigma", fmt17(*d.sigma));
    if (d.dist) {
        kv.emplace_back("dist", dist_name(d.dist->kind));
        switch (d.dist->kind) {
            case Dist::Uniform:
                kv.emplace_back("lo", fmt17(d.dist->p1));
                kv.emplace_back("hi", fmt17(d.dist->p2));
                break;
            case Dist::Normal:
                kv.emplace_back("mean", fmt17(d.dist->p1));
                kv.emplace_back("stdev", fmt17(d.dist->p2));
                break;
            case Dist::Lognormal:
                kv.emplace_back("mu", fmt17(d.dist->p1));
                kv.emplace_back("sigma", fmt17(d.dist->p2));
                break;
        }
    }
    return kv;
}

ModelDescriptor descriptor_from_kv(const std::vector<std::pair<std::string, std::string>>& kv,
                                   const std::string& context) {
    std::map<std::string, std::string> m;
    for (const auto& [k, v] : kv) {
        if (!m.emplace(k, v).second) {
            throw ParameterError(context + ": duplicate key '" + k + "'");
        }
    }
    auto take = [&](const char* key) -> std::string {
        auto it = m.find(key);
        if (it == m.end()) throw ParameterError(context + ": missing key '" + key + "'");
        std::string v = it->second;
        m.erase(it);
        return v;
    };
    auto take_opt = [&](const char* key) -> std::optional<std::string> {
        auto it = m.find(key);
        if (it == m.end()) return std::nullopt;
        std::string v = it->second;
        m.erase(it);
        return v;
    };
    auto num = [&](const std::string& key, const std::string& v) -> double {
        try {
            std::size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ParameterError(context + ": '" + key + "' is not a number: '" + v + "'");
        }
    };

    ModelDescriptor d;
    d.model = model_from_name(take("model"));
    d.seed = static_cast<std::uint64_t>(std::stoull(take("seed")));

    switch (d.model) {
        case Model::Fgn:
        case Model::Fbm:
        case Model::ExpFgn:
            d.hurst = num("hurst", take("hurst"));
            d.n = static_cast<std::size_t>(num("n", take("n")));
            break;
        case Model::Cascade: {
            d.alpha = num("alpha", take("alpha"));
            d.depth = static_cast<int>(num("depth", take("depth")));
            auto n = take_opt("n");
            d.n = n ? static_cast<std::size_t>(num("n", *n))
                    : (std::size_t{1} << *d.depth);
            break;
        }
        case Model::Ar1:
            d.phi = num("phi", take("phi"));
            d.sigma = num("sigma", take("sigma"));
            d.n = static_cast<std::size_t>(num("n", take("n")));
            break;
        case Model::Iid: {
            DistSpec ds;
            ds.kind = dist_from_name(take("dist"));
            switch (ds.kind) {
                case Dist::Uniform:
                    ds.p1 = num("lo", take("lo"));
                    ds.p2 = num("hi", take("hi"));
                    break;
                case Dist::Normal:
                    ds.p1 = num("mean", take("mean"));
                    ds.p2 = num("stdev", take("stdev"));
                    break;
                case Dist::Lognormal:
                    ds.p1 = num("mu", take("mu"));
                    ds.p2 = num("sigma", take("sigma"));
                    break;
            }
            d.dist = ds;
            d.n = static_cast<std::size_t>(num("n", take("n")));
            break;
        }
    }
    if (!m.empty()) {
        throw ParameterError(context + ": extraneous key '" + m.begin()->first + "' for model " +
                             model_name(d.model));
    }
    d.validate();
    return d;
}

}  // namespace mftraffic
