#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mftraffic/analysis.hpp"
#include "mftraffic/config.hpp"
#include "mftraffic/errors.hpp"
#include "mftraffic/experiment.hpp"
#include "mftraffic/generators.hpp"
#include "mftraffic/mixer.hpp"
#include "mftraffic/stats.hpp"
#include "mftraffic/trace_io.hpp"

namespace fs = std::filesystem;
using namespace mftraffic;

namespace {

void echo_resolved(const std::vector<std::string>& args) {
    std::cerr << "# resolved:";
    for (const auto& a : args) std::cerr << ' ' << a;
    std::cerr << '\n';
}

std::string num(double v) { return format_value(v); }

/// Write through a temp file so a failed run leaves nothing behind.
template <typename WriteFn>
void atomic_write(const fs::path& out, WriteFn&& fn) {
    const fs::path tmp = out.string() + ".tmp";
    try {
        fn(tmp);
        fs::rename(tmp, out);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

struct GenerateArgs {
    std::string model;
    std::uint64_t n = 16384;
    double hurst = 0.0;
    int depth = 0;
    double alpha = 0.0;
    double phi = 0.0;
    double sigma = 1.0;
    std::string dist = "uniform";
    double lo = 0.0;
    double hi = 1.0;
    double mean = 0.0;
    double stdev = 1.0;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_generate(const GenerateArgs& a, const CLI::App& sub) {
    ModelDescriptor d;
    d.model = model_from_name(a.model);
    d.seed = a.seed;

    auto used = [&](const char* flag) { return sub.count(flag) > 0; };
    auto reject = [&](const char* flag) {
        if (used(flag)) {
            throw ParameterError(std::string(flag) + " is not a parameter of model " + a.model);
        }
    };

    std::vector<std::string> echo{"generate", "--model", a.model};
    switch (d.model) {
        case Model::Fgn:
        case Model::Fbm:
        case Model::ExpFgn:
            if (!used("--hurst")) throw ParameterError("--hurst is required for model " + a.model);
            if (!(a.hurst > 0.0 && a.hurst < 1.0)) {
                throw ParameterError("--hurst must be in (0,1), got " + num(a.hurst));
            }
            d.hurst = a.hurst;
            d.n = a.n;
            for (const char* f : {"--depth", "--alpha", "--phi", "--sigma", "--dist", "--lo",
                                  "--hi", "--mean", "--stdev"}) {
                reject(f);
            }
            echo.insert(echo.end(), {"--n", std::to_string(a.n), "--hurst", num(a.hurst)});
            break;
        case Model::Cascade:
            if (!used("--depth")) throw ParameterError("--depth is required for model cascade");
            if (!used("--alpha")) throw ParameterError("--alpha is required for model cascade");
            d.depth = a.depth;
            d.alpha = a.alpha;
            if (a.depth >= 1 && a.depth <= 24) d.n = std::size_t{1} << a.depth;
            if (used("--n") && d.n != a.n) {
                throw ParameterError("cascade length is 2^depth; drop --n or match it");
            }
            for (const char* f : {"--hurst", "--phi", "--sigma", "--dist", "--lo", "--hi",
                                  "--mean", "--stdev"}) {
                reject(f);
            }
            echo.insert(echo.end(), {"--depth", std::to_string(a.depth), "--alpha", num(a.alpha)});
            break;
        case Model::Ar1:
            if (!used("--phi")) throw ParameterError("--phi is required for model ar1");
            d.phi = a.phi;
            d.sigma = a.sigma;
            d.n = a.n;
            for (const char* f : {"--hurst", "--depth", "--alpha", "--dist", "--lo", "--hi",
                                  "--mean", "--stdev"}) {
                reject(f);
            }
            echo.insert(echo.end(), {"--n", std::to_string(a.n), "--phi", num(a.phi), "--sigma",
                                     num(a.sigma)});
            break;
        case Model::Iid: {
            DistSpec ds;
            ds.kind = dist_from_name(a.dist);
            echo.insert(echo.end(), {"--n", std::to_string(a.n), "--dist", a.dist});
            if (ds.kind == Dist::Uniform) {
                ds.p1 = a.lo;
                ds.p2 = a.hi;
                reject("--mean");
                reject("--stdev");
                echo.insert(echo.end(), {"--lo", num(a.lo), "--hi", num(a.hi)});
            } else {
                ds.p1 = a.mean;
                ds.p2 = a.stdev;
                reject("--lo");
                reject("--hi");
                echo.insert(echo.end(), {"--mean", num(a.mean), "--stdev", num(a.stdev)});
            }
            d.dist = ds;
            d.n = a.n;
            for (const char* f : {"--hurst", "--depth", "--alpha", "--phi", "--sigma"}) {
                reject(f);
            }
            break;
        }
    }
    echo.insert(echo.end(), {"--seed", std::to_string(a.seed), "--out", a.out});
    echo_resolved(echo);

    d.validate();
    const Series s = generate(d);
    atomic_write(a.out, [&](const fs::path& tmp) {
        write_trace(tmp, s.values, meta_from_series(s));
    });

    std::printf("wrote %s: length=%zu mean=%.6g variance=%.6g\n", a.out.c_str(), s.size(),
                mean(s.values), variance(s.values));
    return 0;
}

struct AnalyzeArgs {
    std::string in;
    std::string out;
    std::string method = "mfdfa";
    double q_min = 0.5;
    double q_max = 10.0;
    double q_step = 0.5;
    int scale_min = 0;
    int scale_max = 0;
    int scale_count = 0;
    int detrend_order = 2;
};

std::vector<int> log_spaced_scales(int smin, int smax, int count) {
    if (smin < 2 || smax <= smin || count < 2) {
        throw ParameterError("scales need min >= 2, max > min, count >= 2");
    }
    std::vector<int> out;
    const double lo = std::log(static_cast<double>(smin));
    const double hi = std::log(static_cast<double>(smax));
    for (int i = 0; i < count; ++i) {
        const int s = static_cast<int>(std::lround(std::exp(lo + (hi - lo) * i / (count - 1))));
        if (out.empty() || s > out.back()) out.push_back(s);
    }
    return out;
}

int cmd_analyze(const AnalyzeArgs& a, const CLI::App& sub) {
    const EstimatorMethod method = method_from_name(a.method);
    if (method == EstimatorMethod::Moments && sub.count("--detrend-order") > 0) {
        throw ParameterError("--detrend-order applies to mfdfa only");
    }

    const Trace trace = read_trace(a.in);
    const std::size_t n = trace.values.size();

    int smin = a.scale_min;
    int smax = a.scale_max;
    int count = a.scale_count;
    if (method == EstimatorMethod::Mfdfa) {
        if (smin == 0) smin = 16;
        if (smax == 0) smax = static_cast<int>(n / 4);
        if (count == 0) count = 12;
    } else {
        if (smin == 0) smin = 4;
        if (smax == 0) smax = static_cast<int>(std::min(std::max<std::size_t>(8, n / 64), n / 4));
        if (count == 0) count = static_cast<int>(std::lround(std::log2(double(smax) / smin))) + 1;
    }

    std::string out = a.out;
    if (out.empty()) {
        fs::path p(a.in);
        p.replace_extension("");
        out = p.string() + ".spectrum.csv";
    }

    std::vector<std::string> echo{"analyze",     "--in",
                                  a.in,          "--method",
                                  a.method,      "--q-min",
                                  num(a.q_min),  "--q-max",
                                  num(a.q_max),  "--q-step",
                                  num(a.q_step), "--scale-min",
                                  std::to_string(smin), "--scale-max",
                                  std::to_string(smax), "--scale-count",
                                  std::to_string(count)};
    if (method == EstimatorMethod::Mfdfa) {
        echo.insert(echo.end(), {"--detrend-order", std::to_string(a.detrend_order)});
    }
    echo.insert(echo.end(), {"--out", out});
    echo_resolved(echo);

    const QGrid q = QGrid::range(a.q_min, a.q_max, a.q_step);
    const std::vector<int> scales = log_spaced_scales(smin, smax, count);
    Series series{trace.values, std::nullopt};

    HurstSpectrum spec;
    if (method == EstimatorMethod::Mfdfa) {
        ScalePlan plan;
        plan.scales = scales;
        plan.detrend_order = a.detrend_order;
        spec = mfdfa(series, q, plan);
    } else {
        spec = moment_spectrum(series, q, scales);
    }

    atomic_write(out, [&](const fs::path& tmp) {
        write_spectrum(tmp, spec, scales, a.detrend_order, trace.meta);
    });

    for (const auto& w : spec.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    for (std::size_t i = 0; i < spec.q.size(); ++i) {
        if (spec.defined[i] && spec.r2[i] < 0.95) {
            std::cerr << "warning: poor fit at q=" << format_value(spec.q.values[i])
                      << " (r2=" << spec.r2[i] << ")\n";
        }
    }

    // h(2) plus the h(q) spread over the positive-q part of the grid
    double h2 = std::numeric_limits<double>::quiet_NaN();
    bool h2_found = false;
    for (std::size_t i = 0; i < spec.q.size(); ++i) {
        if (spec.q.values[i] == 2.0 && spec.defined[i]) {
            h2 = spec.h[i];
            h2_found = true;
        }
    }
    if (!h2_found) {
        try {
            QGrid g2;
            g2.values = {2.0};
            HurstSpectrum s2;
            if (method == EstimatorMethod::Mfdfa) {
                ScalePlan plan;
                plan.scales = scales;
                plan.detrend_order = a.detrend_order;
                s2 = mfdfa(series, g2, plan);
            } else {
                s2 = moment_spectrum(series, g2, scales);
            }
            if (s2.defined[0]) h2 = s2.h[0];
        } catch (const Error&) {
            // leave nan
        }
    }

    double lo = 0.0;
    double hi = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < spec.q.size(); ++i) {
        if (spec.q.values[i] > 0.0 && spec.defined[i]) {
            if (!any) {
                lo = hi = spec.h[i];
                any = true;
            } else {
                lo = std::min(lo, spec.h[i]);
                hi = std::max(hi, spec.h[i]);
            }
        }
    }
    std::printf("wrote %s\n", out.c_str());
    std::printf("h(2)=%.6g\n", h2);
    if (any) {
        std::printf("spread(q>0)=%.6g\n", hi - lo);
    } else {
        std::printf("spread(q>0)=n/a\n");
    }
    return 0;
}

struct MixArgs {
    std::string signal;
    std::string noise;
    double snr = 0.0;
    std::string out;
};

int cmd_mix(const MixArgs& a) {
    echo_resolved({"mix", "--signal", a.signal, "--noise", a.noise, "--snr", num(a.snr), "--out",
                   a.out});
    if (!(a.snr > 0.0) || !std::isfinite(a.snr)) {
        throw ParameterError("--snr must be finite and > 0");
    }
    const Trace sig = read_trace(a.signal);
    const Trace noi = read_trace(a.noise);
    if (sig.values.size() != noi.values.size()) {
        throw ParameterError("trace lengths differ: " + std::to_string(sig.values.size()) +
                             " vs " + std::to_string(noi.values.size()));
    }
    const MixResult r = mix(Series{sig.values, std::nullopt}, Series{noi.values, std::nullopt},
                            MixSpec{a.snr});

    MetaKv meta = prefixed(sig.meta, "signal.");
    const MetaKv nmeta = prefixed(noi.meta, "noise.");
    meta.insert(meta.end(), nmeta.begin(), nmeta.end());
    meta.emplace_back("mix.snr", format_value(a.snr));
    meta.emplace_back("mix.noise_scale", format_value(r.noise_scale));
    atomic_write(a.out, [&](const fs::path& tmp) { write_trace(tmp, r.sum.values, meta); });

    std::printf("wrote %s: noise_scale=%.12g achieved_snr=%.12g\n", a.out.c_str(), r.noise_scale,
                r.achieved_snr);
    return 0;
}

struct OracleArgs {
    double alpha = 0.0;
    std::vector<double> q;
    double q_min = 0.5;
    double q_max = 10.0;
    double q_step = 0.5;
    std::string out;
};

int cmd_oracle(const OracleArgs& a) {
    QGrid grid;
    if (!a.q.empty()) {
        grid.values = a.q;
        std::sort(grid.values.begin(), grid.values.end());
        grid.validate();
    } else {
        grid = QGrid::range(a.q_min, a.q_max, a.q_step);
    }

    std::vector<std::string> echo{"oracle", "cascade", "--alpha", num(a.alpha)};
    for (double q : grid.values) echo.insert(echo.end(), {"--q", num(q)});
    if (!a.out.empty()) echo.insert(echo.end(), {"--out", a.out});
    echo_resolved(echo);

    std::vector<double> h(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        h[i] = cascade_theoretical_h(grid.values[i], a.alpha);
        std::printf("h(%s) = %.12g\n", format_value(grid.values[i]).c_str(), h[i]);
    }

    if (!a.out.empty()) {
        atomic_write(a.out, [&](const fs::path& tmp) {
            std::ofstream out(tmp);
            if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
            out << "# method=oracle-cascade\n";
            out << "# alpha=" << format_value(a.alpha) << "\n";
            out << "q,h,intercept,r2,defined\n";
            for (std::size_t i = 0; i < grid.size(); ++i) {
                out << format_value(grid.values[i]) << "," << format_value(h[i]) << ",0,1,1\n";
            }
            out.flush();
            if (!out) throw IoError("write failed: " + tmp.string());
        });
        std::printf("wrote %s\n", a.out.c_str());
    }
    return 0;
}

struct ExperimentArgs {
    std::string config;
    std::string out_dir = "results";
    int replicates = 0;  // 0 = use config value
};

int cmd_experiment(const ExperimentArgs& a) {
    ExperimentConfig cfg = load_experiment_config(a.config);
    if (a.replicates > 0) cfg.replicates = a.replicates;
    echo_resolved({"experiment", "--config", a.config, "--out-dir", a.out_dir, "--replicates",
                   std::to_string(cfg.replicates)});

    const ResultsTable table = run_sweep(cfg);
    emit_results(table, a.out_dir);

    std::printf("%-16s %10s %16s %16s\n", "noise", "snr", "deviation_mean", "deviation_std");
    for (const auto& row : table.summary) {
        std::printf("%-16s %10.6g %16.6g %16.6g\n", row.noise_label.c_str(), row.snr,
                    row.deviation_mean, row.deviation_std);
    }
    if (!table.failures.empty()) {
        std::printf("%zu cell(s) failed; see comment rows in %s/results.csv\n",
                    table.failures.size(), a.out_dir.c_str());
    }
    std::printf("wrote %s/results.csv, %s/summary.csv and %zu figure file(s)\n", a.out_dir.c_str(),
                a.out_dir.c_str(), table.noise_labels.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-similar and multifractal traffic streams: synthesis, additive mixing at a "
                 "controlled variance SNR, and generalized Hurst exponent estimation"};
    app.require_subcommand(1);

    GenerateArgs g;
    CLI::App* gen = app.add_subcommand("generate", "Synthesize a model traffic trace");
    gen->add_option("--model", g.model, "fgn, fbm, exp-fgn, cascade, ar1, iid")->required();
    gen->add_option("--n", g.n, "series length (ignored for cascade; default 16384)");
    gen->add_option("--hurst", g.hurst, "Hurst exponent in (0,1) for fgn/fbm/exp-fgn");
    gen->add_option("--depth", g.depth, "cascade levels; length is 2^depth");
    gen->add_option("--alpha", g.alpha, "cascade Beta(alpha,alpha) weight shape, > 0");
    gen->add_option("--phi", g.phi, "ar1 coefficient in (-1,1)");
    gen->add_option("--sigma", g.sigma, "ar1 innovation stdev (default 1)");
    gen->add_option("--dist", g.dist, "iid marginal: uniform, normal, lognormal");
    gen->add_option("--lo", g.lo, "uniform lower bound (default 0)");
    gen->add_option("--hi", g.hi, "uniform upper bound (default 1)");
    gen->add_option("--mean", g.mean, "normal mean / lognormal log-mean (default 0)");
    gen->add_option("--stdev", g.stdev, "normal stdev / lognormal log-stdev (default 1)");
    gen->add_option("--seed", g.seed, "rng seed (default 1)");
    gen->add_option("--out", g.out, "output trace CSV")->required();

    AnalyzeArgs an;
    CLI::App* analyze = app.add_subcommand("analyze", "Estimate the generalized Hurst exponent");
    analyze->add_option("--in", an.in, "input trace CSV")->required();
    analyze->add_option("--method", an.method, "mfdfa (default) or moments");
    analyze->add_option("--q-min", an.q_min, "lowest moment order (default 0.5)");
    analyze->add_option("--q-max", an.q_max, "highest moment order (default 10)");
    analyze->add_option("--q-step", an.q_step, "grid step (default 0.5)");
    analyze->add_option("--scale-min", an.scale_min, "smallest window (default: method-specific)");
    analyze->add_option("--scale-max", an.scale_max, "largest window (default: method-specific)");
    analyze->add_option("--scale-count", an.scale_count, "number of windows");
    analyze->add_option("--detrend-order", an.detrend_order,
                        "mfdfa detrending polynomial order (default 2)");
    analyze->add_option("--out", an.out, "output spectrum CSV (default <in>.spectrum.csv)");

    MixArgs mx;
    CLI::App* mixcmd = app.add_subcommand("mix", "Additively mix signal and noise at a target "
                                                 "variance SNR");
    mixcmd->add_option("--signal", mx.signal, "signal trace CSV")->required();
    mixcmd->add_option("--noise", mx.noise, "noise trace CSV")->required();
    mixcmd->add_option("--snr", mx.snr, "target Var[signal]/Var[scaled noise], > 0")->required();
    mixcmd->add_option("--out", mx.out, "output trace CSV")->required();

    OracleArgs orc;
    CLI::App* oracle = app.add_subcommand("oracle", "Analytic h(q) references");
    oracle->require_subcommand(1);
    CLI::App* occ = oracle->add_subcommand("cascade",
                                           "closed-form h(q) of the Beta-weight cascade");
    occ->add_option("--alpha", orc.alpha, "Beta(alpha,alpha) weight shape, > 0")->required();
    occ->add_option("--q", orc.q, "explicit q value (repeatable; overrides the grid)");
    occ->add_option("--q-min", orc.q_min, "grid start (default 0.5)");
    occ->add_option("--q-max", orc.q_max, "grid end (default 10)");
    occ->add_option("--q-step", orc.q_step, "grid step (default 0.5)");
    occ->add_option("--out", orc.out, "optional spectrum CSV");

    ExperimentArgs ex;
    CLI::App* experiment = app.add_subcommand("experiment", "Run a noise x SNR sweep from a "
                                                            "config file");
    experiment->add_option("--config", ex.config, "experiment config file")->required();
    experiment->add_option("--out-dir", ex.out_dir, "output directory (default results)");
    experiment->add_option("--replicates", ex.replicates, "override the config replicate count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_generate(g, *gen);
        if (analyze->parsed()) return cmd_analyze(an, *analyze);
        if (mixcmd->parsed()) return cmd_mix(mx);
        if (oracle->parsed()) return cmd_oracle(orc);
        if (experiment->parsed()) return cmd_experiment(ex);
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
