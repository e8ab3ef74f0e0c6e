#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "mftraffic/analysis.hpp"
#include "mftraffic/errors.hpp"
#include "mftraffic/generators.hpp"
#include "mftraffic/rng.hpp"
#include "mftraffic/stats.hpp"

using namespace mftraffic;

namespace {

// independent oracle: the closed-form fGn autocovariance
double fgn_gamma_ref(int k, double hurst) {
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(std::abs(k + 1), h2) - 2.0 * std::pow(std::abs(k), h2) +
                  std::pow(std::abs(k - 1), h2));
}

double seed_mean(int seeds, const std::function<double(std::uint64_t)>& fn) {
    double acc = 0.0;
    for (int s = 1; s <= seeds; ++s) acc += fn(static_cast<std::uint64_t>(s));
    return acc / seeds;
}

}  // namespace

TEST_SUITE_BEGIN("generators");

TEST_CASE("every generator is a pure function of its descriptor") {
    const std::vector<ModelDescriptor> descriptors = [] {
        std::vector<ModelDescriptor> out;
        ModelDescriptor d;
        d.model = Model::Fgn;
        d.hurst = 0.7;
        d.n = 256;
        d.seed = 9;
        out.push_back(d);
        d.model = Model::Fbm;
        out.push_back(d);
        d.model = Model::ExpFgn;
        out.push_back(d);
        d = ModelDescriptor{};
        d.model = Model::Cascade;
        d.alpha = 1.5;
        d.depth = 8;
        d.n = 256;
        d.seed = 9;
        out.push_back(d);
        d = ModelDescriptor{};
        d.model = Model::Ar1;
        d.phi = 0.6;
        d.sigma = 2.0;
        d.n = 256;
        d.seed = 9;
        out.push_back(d);
        d = ModelDescriptor{};
        d.model = Model::Iid;
        d.dist = DistSpec{Dist::Lognormal, 0.0, 1.0};
        d.n = 256;
        d.seed = 9;
        out.push_back(d);
        return out;
    }();
    for (const auto& d : descriptors) {
        CAPTURE(model_name(d.model));
        const Series a = generate(d);
        const Series b = generate(d);
        CHECK(a.values == b.values);  // bit-identical
        REQUIRE(a.meta.has_value());
        CHECK(*a.meta == d);
        for (double v : a.values) CHECK(std::isfinite(v));
    }
}

TEST_CASE("fgn with H=0.5 is white: autocovariance vanishes at positive lags") {
    for (int lag : {1, 2, 5}) {
        const double c = seed_mean(10, [&](std::uint64_t seed) {
            return autocovariance(gen_fgn(1 << 14, 0.5, seed).values, lag);
        });
        CHECK(std::abs(c) < 0.05);
    }
}

TEST_CASE("fgn matches the closed-form autocovariance at lags 1..20") {
    for (double hurst : {0.6, 0.8}) {
        CAPTURE(hurst);
        for (int lag = 1; lag <= 20; ++lag) {
            const double c = seed_mean(10, [&](std::uint64_t seed) {
                return autocovariance(gen_fgn(1 << 14, hurst, seed).values, lag);
            });
            CHECK(std::abs(c - fgn_gamma_ref(lag, hurst)) < 0.05);
        }
    }
}

TEST_CASE("fgn is zero-mean unit-variance") {
    const double m = seed_mean(10, [](std::uint64_t seed) {
        return mean(gen_fgn(1 << 14, 0.8, seed).values);
    });
    const double v = seed_mean(10, [](std::uint64_t seed) {
        return variance(gen_fgn(1 << 14, 0.8, seed).values);
    });
    CHECK(std::abs(m) < 0.1);  // LRD slows the mean's convergence
    CHECK(std::abs(v - 1.0) < 0.1);
}

TEST_CASE("fgn parameter errors") {
    CHECK_THROWS_AS(gen_fgn(128, 0.0, 1), ParameterError);
    CHECK_THROWS_AS(gen_fgn(128, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(gen_fgn(128, 1.5, 1), ParameterError);
    CHECK_THROWS_AS(gen_fgn(128, -0.2, 1), ParameterError);
    CHECK_THROWS_AS(gen_fgn(1, 0.5, 1), ParameterError);
}

TEST_CASE("fbm is the running sum of fgn with the same seed") {
    const Series inc = gen_fgn(512, 0.7, 3);
    const Series path = gen_fbm(512, 0.7, 3);
    double acc = 0.0;
    for (std::size_t i = 0; i < inc.size(); ++i) {
        acc += inc.values[i];
        CHECK(path.values[i] == acc);
    }
    CHECK(path.meta->model == Model::Fbm);
}

TEST_CASE("fbm H=0.5 is ordinary Brownian motion: iid Gaussian increments") {
    const Series path = gen_fbm(1 << 14, 0.5, 11);
    std::vector<double> inc(path.size() - 1);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        inc[i] = path.values[i + 1] - path.values[i];
    }
    CHECK(std::abs(autocorrelation(inc, 1)) < 0.05);
    CHECK(std::abs(mean(inc)) < 0.05);
    CHECK(variance(inc) == doctest::Approx(1.0).epsilon(0.05));
    // rough gaussianity: standardized fourth moment near 3
    const double m = mean(inc);
    const double sd = std::sqrt(variance(inc));
    double k4 = 0.0;
    for (double v : inc) k4 += std::pow((v - m) / sd, 4.0);
    k4 /= static_cast<double>(inc.size());
    CHECK(k4 == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("fbm dyadic window variance ratio follows 2^{2H}") {
    // oracle: Var[X(2t)] / Var[X(t)] = 2^{2H} for window increments
    const double hurst = 0.7;
    const std::size_t n = 1 << 12;
    for (int t : {8, 16, 32}) {
        double var_t = 0.0;
        double var_2t = 0.0;
        for (std::uint64_t seed = 3; seed < 13; ++seed) {
            const Series path = gen_fbm(n, hurst, seed);
            auto window_var = [&](int w) {
                std::vector<double> d;
                for (std::size_t i = 0; i + w < n; i += w) {
                    d.push_back(path.values[i + w] - path.values[i]);
                }
                return variance(d);
            };
            var_t += window_var(t);
            var_2t += window_var(2 * t);
        }
        const double ratio = var_2t / var_t;
        CHECK(ratio == doctest::Approx(std::pow(2.0, 2.0 * hurst)).epsilon(0.15));
    }
}

TEST_CASE("exp_transform basics") {
    Series zeros;
    zeros.values = {0.0, 0.0, 0.0};
    const Series ones = exp_transform(zeros);
    CHECK(ones.values == std::vector<double>{1.0, 1.0, 1.0});

    const Series g = gen_fgn(4096, 0.8, 5);
    const Series e = exp_transform(g);
    for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(e.values[i] > 0.0);
        CHECK(e.values[i] == std::exp(g.values[i]));
    }
    CHECK(e.meta->model == Model::ExpFgn);
    // long-range dependence survives the transform
    CHECK(autocorrelation(e.values, 1) > 0.1);
}

TEST_CASE("exp_transform overflow names the offending index") {
    Series bad;
    bad.values = {0.0, 1.0, 800.0, 2.0};
    CHECK_THROWS_WITH_AS(exp_transform(bad), doctest::Contains("index 2"), ParameterError);
}

TEST_CASE("cascade depth 1 splits a unit mass") {
    const Series s = gen_cascade(1, 2.0, 77);
    REQUIRE(s.size() == 2);
    // leaves are (2w, 2(1-w)); conservation makes them sum to 2^depth
    CHECK(s.values[0] + s.values[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.values[0] > 0.0);
    CHECK(s.values[1] > 0.0);
}

TEST_CASE("cascade conserves mass: mean is 1 for every depth/alpha/seed") {
    for (int depth : {4, 10, 14}) {
        for (double alpha : {0.4, 1.0, 3.0}) {
            for (std::uint64_t seed : {1ULL, 42ULL, 977ULL}) {
                const Series s = gen_cascade(depth, alpha, seed);
                CHECK(s.size() == (std::size_t{1} << depth));
                CHECK(mean(s.values) == doctest::Approx(1.0).epsilon(1e-10));
                for (double v : s.values) CHECK(v >= 0.0);
            }
        }
    }
}

TEST_CASE("cascade parameter errors") {
    CHECK_THROWS_AS(gen_cascade(0, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(gen_cascade(-3, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(gen_cascade(10, 0.0, 1), ParameterError);
    CHECK_THROWS_AS(gen_cascade(10, -1.0, 1), ParameterError);
}

TEST_CASE("beta moment formula agrees with Monte Carlo sampling") {
    // trust the closed form only after checking it against raw draws
    auto mc_moment = [](double q, double alpha) {
        Rng rng(20240801);
        const int draws = 200000;
        double acc = 0.0;
        for (int i = 0; i < draws; ++i) acc += std::pow(rng.beta_symmetric(alpha), q);
        return acc / draws;
    };
    CHECK(mc_moment(2.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(0.01));
    CHECK(mc_moment(2.0, 2.0) == doctest::Approx(0.3).epsilon(0.01));
    for (auto [q, alpha] : std::vector<std::pair<double, double>>{
             {1.0, 1.0}, {2.0, 1.0}, {3.0, 1.5}, {0.5, 2.0}, {-0.4, 0.8}}) {
        CAPTURE(q);
        CAPTURE(alpha);
        CHECK(beta_moment(q, alpha) == doctest::Approx(mc_moment(q, alpha)).epsilon(0.02));
    }
    // sanity on the sampler itself
    Rng rng(7);
    double m = 0.0;
    for (int i = 0; i < 100000; ++i) m += rng.beta_symmetric(3.0);
    CHECK(m / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("cascade_theoretical_h closed-form values") {
    for (double alpha : {0.5, 1.0, 3.0}) {
        CHECK(cascade_theoretical_h(1.0, alpha) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // E[W^2] = 1/3 for alpha=1, so h(2) = log2(3)/2
    CHECK(cascade_theoretical_h(2.0, 1.0) == doctest::Approx(0.5 * std::log2(3.0)).epsilon(1e-12));
    CHECK(cascade_theoretical_h(2.0, 1.0) == doctest::Approx(0.7925).epsilon(1e-3));
    // degenerate cascade: W -> 1/2 a.s., h -> 1 for all q
    CHECK(cascade_theoretical_h(5.0, 100.0) == doctest::Approx(1.0).epsilon(0.02));
    // q=0 limit equals -E[ln W]/ln 2; for alpha=1, E[ln W] = -1
    CHECK(cascade_theoretical_h(0.0, 1.0) == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-3));
}

TEST_CASE("cascade_theoretical_h is strictly decreasing in q") {
    for (double alpha : {0.5, 1.0, 4.0}) {
        double prev = cascade_theoretical_h(-alpha / 2.0, alpha);
        for (double q = -alpha / 2.0 + 0.25; q <= 10.0; q += 0.25) {
            const double h = cascade_theoretical_h(q, alpha);
            CHECK(h < prev);
            prev = h;
        }
    }
}

TEST_CASE("cascade_theoretical_h domain errors") {
    CHECK_THROWS_AS(cascade_theoretical_h(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(cascade_theoretical_h(-1.5, 1.5), DomainError);
    CHECK_THROWS_AS(cascade_theoretical_h(1.0, -1.0), ParameterError);
}

TEST_CASE("ar1 with phi=0 is iid gaussian") {
    const Series s = gen_ar1(1 << 14, 0.0, 1.0, 4);
    CHECK(std::abs(autocorrelation(s.values, 1)) < 0.03);
    CHECK(variance(s.values) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("ar1 lag-1 autocorrelation converges to phi") {
    const double c = seed_mean(10, [](std::uint64_t seed) {
        return autocorrelation(gen_ar1(1 << 14, 0.7, 1.0, seed).values, 1);
    });
    CHECK(c == doctest::Approx(0.7).epsilon(0.03 / 0.7));
}

TEST_CASE("ar1 stationary variance is sigma^2/(1-phi^2)") {
    const double phi = 0.7;
    const double sigma = 2.0;
    const double v = seed_mean(10, [&](std::uint64_t seed) {
        return variance(gen_ar1(1 << 14, phi, sigma, seed).values);
    });
    CHECK(v == doctest::Approx(sigma * sigma / (1.0 - phi * phi)).epsilon(0.10));
}

TEST_CASE("ar1 parameter errors") {
    CHECK_THROWS_AS(gen_ar1(128, 1.0, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(gen_ar1(128, -1.2, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(gen_ar1(128, 0.5, 0.0, 1), ParameterError);
}

TEST_CASE("iid uniform sample moments match the closed form") {
    const Series s = gen_iid(1 << 14, DistSpec{Dist::Uniform, 0.0, 1.0}, 6);
    CHECK(mean(s.values) == doctest::Approx(0.5).epsilon(0.02 / 0.5));
    CHECK(std::abs(variance(s.values) - 1.0 / 12.0) < 0.005);
    for (double v : s.values) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("iid normal and lognormal moments") {
    const Series n = gen_iid(1 << 14, DistSpec{Dist::Normal, 0.0, 1.0}, 8);
    CHECK(std::abs(mean(n.values)) < 0.03);
    CHECK(variance(n.values) == doctest::Approx(1.0).epsilon(0.05));

    const Series ln = gen_iid(1 << 14, DistSpec{Dist::Lognormal, 0.0, 1.0}, 8);
    for (double v : ln.values) CHECK(v > 0.0);
    CHECK(mean(ln.values) == doctest::Approx(std::exp(0.5)).epsilon(0.05));
}

TEST_CASE("iid parameter errors") {
    CHECK_THROWS_AS(gen_iid(128, DistSpec{Dist::Uniform, 1.0, 0.0}, 1), ParameterError);
    CHECK_THROWS_AS(gen_iid(128, DistSpec{Dist::Uniform, 0.5, 0.5}, 1), ParameterError);
    CHECK_THROWS_AS(gen_iid(128, DistSpec{Dist::Normal, 0.0, -1.0}, 1), ParameterError);
    CHECK_THROWS_AS(gen_iid(1, DistSpec{Dist::Uniform, 0.0, 1.0}, 1), ParameterError);
}

TEST_CASE("descriptor validation rejects missing and extraneous fields") {
    ModelDescriptor d;
    d.model = Model::Fgn;
    d.n = 64;
    CHECK_THROWS_AS(d.validate(), ParameterError);  // missing hurst
    d.hurst = 0.5;
    CHECK_NOTHROW(d.validate());
    d.phi = 0.3;  // extraneous for fgn
    CHECK_THROWS_AS(d.validate(), ParameterError);

    ModelDescriptor c;
    c.model = Model::Cascade;
    c.alpha = 1.0;
    c.depth = 4;
    c.n = 15;  // must be 2^depth
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c.n = 16;
    CHECK_NOTHROW(c.validate());
}

TEST_SUITE_END();
