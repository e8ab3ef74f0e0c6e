#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "mftraffic/errors.hpp"
#include "mftraffic/generators.hpp"
#include "mftraffic/trace_io.hpp"

using namespace mftraffic;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mftraffic_io_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_SUITE_BEGIN("trace_io");

TEST_CASE("traces round-trip bit-identically for every model") {
    TempDir dir;
    std::vector<ModelDescriptor> descriptors;
    {
        ModelDescriptor d;
        d.model = Model::Fgn;
        d.hurst = 0.7243112358132;
        d.n = 64;
        d.seed = 1234567890123ULL;
        descriptors.push_back(d);
        d.model = Model::ExpFgn;
        descriptors.push_back(d);
        d = ModelDescriptor{};
        d.model = Model::Cascade;
        d.alpha = 0.37;
        d.depth = 6;
        d.n = 64;
        d.seed = 3;
        descriptors.push_back(d);
        d = ModelDescriptor{};
        d.model = Model::Ar1;
        d.phi = -0.33;
        d.sigma = 1.7;
        d.n = 64;
        d.seed = 4;
        descriptors.push_back(d);
        d = ModelDescriptor{};
        d.model = Model::Iid;
        d.dist = DistSpec{Dist::Lognormal, -0.5, 2.0};
        d.n = 64;
        d.seed = 5;
        descriptors.push_back(d);
    }
    for (const auto& d : descriptors) {
        CAPTURE(model_name(d.model));
        const Series s = generate(d);
        const fs::path p = dir.path / (model_name(d.model) + ".csv");
        write_trace(p, s.values, meta_from_series(s));
        const Trace t = read_trace(p);
        CHECK(t.values == s.values);  // 17 significant digits are lossless
        CHECK(descriptor_from_meta(t.meta) == d);
    }
}

TEST_CASE("malformed traces fail with a line number") {
    TempDir dir;
    const fs::path bad_value = dir.path / "bad_value.csv";
    write_text(bad_value, "# model=fgn\nvalue\n1.0\nbogus\n2.0\n");
    CHECK_THROWS_WITH_AS(read_trace(bad_value), doctest::Contains(":4"), IoError);

    const fs::path no_header = dir.path / "no_header.csv";
    write_text(no_header, "1.0\n2.0\n");
    CHECK_THROWS_AS(read_trace(no_header), IoError);

    const fs::path not_finite = dir.path / "nan.csv";
    write_text(not_finite, "value\n1.0\nnan\n");
    CHECK_THROWS_WITH_AS(read_trace(not_finite), doctest::Contains(":3"), IoError);

    const fs::path too_short = dir.path / "short.csv";
    write_text(too_short, "value\n1.0\n");
    CHECK_THROWS_AS(read_trace(too_short), IoError);

    CHECK_THROWS_AS(read_trace(dir.path / "missing.csv"), IoError);
}

TEST_CASE("mixed-trace metadata keeps both parents under prefixes") {
    TempDir dir;
    const Series sig = gen_cascade(4, 1.0, 1);
    const Series noi = gen_iid(16, DistSpec{Dist::Uniform, 0.0, 1.0}, 2);
    MetaKv meta = prefixed(meta_from_series(sig), "signal.");
    const MetaKv nmeta = prefixed(meta_from_series(noi), "noise.");
    meta.insert(meta.end(), nmeta.begin(), nmeta.end());
    meta.emplace_back("mix.snr", "5");
    meta.emplace_back("mix.noise_scale", format_value(0.25));

    const fs::path p = dir.path / "mixed.csv";
    write_trace(p, sig.values, meta);
    const Trace t = read_trace(p);
    CHECK(t.meta == meta);

    MetaKv signal_part;
    for (const auto& [k, v] : t.meta) {
        if (k.rfind("signal.", 0) == 0) signal_part.emplace_back(k.substr(7), v);
    }
    CHECK(descriptor_from_kv(signal_part, "test") == *sig.meta);
}

TEST_CASE("spectra round-trip including undefined rows") {
    TempDir dir;
    HurstSpectrum s;
    s.q.values = {-1.0, 0.0, 2.0};
    s.h = {0.5, std::nan(""), 0.75};
    s.intercept = {1.25, std::nan(""), -0.5};
    s.r2 = {0.99, std::nan(""), 1.0};
    s.defined = {true, false, true};
    s.method = EstimatorMethod::Moments;

    const fs::path p = dir.path / "spec.csv";
    write_spectrum(p, s, {4, 8, 16}, 2, {{"model", "fgn"}, {"hurst", "0.5"}});
    const HurstSpectrum r = read_spectrum(p);
    CHECK(r.method == EstimatorMethod::Moments);
    CHECK(r.q.values == s.q.values);
    CHECK(r.h[0] == s.h[0]);
    CHECK(std::isnan(r.h[1]));
    CHECK(r.h[2] == s.h[2]);
    CHECK(r.defined == s.defined);
    CHECK(r.intercept[0] == s.intercept[0]);
    CHECK(r.r2[2] == s.r2[2]);
}

TEST_CASE("descriptor kv rejects junk") {
    CHECK_THROWS_AS(descriptor_from_kv({{"model", "warp"}, {"n", "8"}, {"seed", "1"}}, "t"),
                    ParameterError);
    CHECK_THROWS_AS(
        descriptor_from_kv(
            {{"model", "fgn"}, {"n", "8"}, {"seed", "1"}, {"hurst", "0.5"}, {"phi", "0.1"}}, "t"),
        ParameterError);
    CHECK_THROWS_AS(descriptor_from_kv({{"model", "fgn"}, {"n", "8"}, {"seed", "1"}}, "t"),
                    ParameterError);
    CHECK_THROWS_AS(
        descriptor_from_kv({{"model", "fgn"}, {"n", "8"}, {"seed", "1"}, {"hurst", "x"}}, "t"),
        ParameterError);
}

TEST_SUITE_END();
