#include "mftraffic/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

#include "mftraffic/errors.hpp"
#include "mftraffic/generators.hpp"
#include "mftraffic/mixer.hpp"
#include "mftraffic/rng.hpp"
#include "mftraffic/stats.hpp"
#include "mftraffic/trace_io.hpp"

namespace mftraffic {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool label_ok(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_';
        if (!ok) return false;
    }
    return true;
}

unsigned parallel_width(std::size_t jobs) {
    unsigned w = 0;
    if (const char* env = std::getenv("MFTRAFFIC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) {
            throw ParameterError("MFTRAFFIC_THREADS must be a positive integer");
        }
        w = static_cast<unsigned>(v);
    }
    if (w == 0) w = std::thread::hardware_concurrency();
    if (w == 0) w = 1;
    if (jobs < w) w = static_cast<unsigned>(jobs);
    return w;
}

/// Run fn(0..count) on a small pool. fn must not throw; every result slot
/// is written exactly once, so the schedule cannot affect the output.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const unsigned width = parallel_width(count);
    if (width <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(width);
    for (unsigned w = 0; w < width; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

std::uint64_t cell_seed(std::uint64_t base, std::size_t noise_i, std::size_t snr_i,
                        std::size_t rep) {
    std::uint64_t h = splitmix64(base ^ 0x6D66747261666669ULL);
    h = splitmix64(h ^ (noise_i + 1));
    h = splitmix64(h ^ (snr_i + 1));
    h = splitmix64(h ^ (rep + 1));
    return h;
}

HurstSpectrum estimate(const Series& x, const ExperimentConfig& cfg) {
    if (cfg.method == EstimatorMethod::Mfdfa) {
        return mfdfa(x, cfg.q, cfg.plan);
    }
    return moment_spectrum(x, cfg.q, cfg.plan.scales);
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    return std::sqrt(variance(v));
}

/// Standard error of the mean; shrinks ~1/sqrt(count).
double std_error(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    return std::sqrt(variance(v) / static_cast<double>(v.size()));
}

std::string fmt_snr(double snr) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", snr);
    return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
    base_signal.validate();
    if (base_signal.model != Model::Cascade) {
        throw ParameterError("experiment signal model must be cascade");
    }
    if (noise_models.empty()) {
        throw ParameterError("experiment needs at least one noise model");
    }
    for (const auto& nm : noise_models) {
        if (!label_ok(nm.label)) {
            throw ParameterError("noise label '" + nm.label +
                                 "' must be non-empty [A-Za-z0-9_-]");
        }
        nm.desc.validate();
        if (nm.desc.n != base_signal.n) {
            throw ParameterError("noise '" + nm.label + "' length " +
                                 std::to_string(nm.desc.n) + " differs from signal length " +
                                 std::to_string(base_signal.n));
        }
    }
    for (std::size_t i = 0; i < noise_models.size(); ++i) {
        for (std::size_t j = i + 1; j < noise_models.size(); ++j) {
            if (noise_models[i].label == noise_models[j].label) {
                throw ParameterError("duplicate noise label '" + noise_models[i].label + "'");
            }
        }
    }
    if (snr_levels.empty()) {
        throw ParameterError("experiment needs at least one snr level");
    }
    for (std::size_t i = 0; i < snr_levels.size(); ++i) {
        if (!(snr_levels[i] > 0.0) || !std::isfinite(snr_levels[i])) {
            throw ParameterError("snr levels must be finite and > 0");
        }
        if (i > 0 && !(snr_levels[i] > snr_levels[i - 1])) {
            throw ParameterError("snr levels must be strictly increasing");
        }
    }
    if (replicates < 1) {
        throw ParameterError("replicates must be >= 1");
    }
    q.validate();
    plan.validate(base_signal.n);
    if (!(deviation_q_min <= deviation_q_max)) {
        throw ParameterError("deviation range requires q_min <= q_max");
    }
}

ResultsTable run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto reps = static_cast<std::size_t>(cfg.replicates);
    const std::size_t n_noise = cfg.noise_models.size();
    const std::size_t n_snr = cfg.snr_levels.size();
    const std::size_t nq = cfg.q.size();

    // Phase 1: one signal realization and its spectrum per replicate.
    std::vector<Series> signal(reps);
    std::vector<HurstSpectrum> h_multi(reps);
    std::vector<std::string> signal_error(reps);
    parallel_for(reps, [&](std::size_t r) {
        try {
            ModelDescriptor d = cfg.base_signal;
            d.seed = cfg.base_seed + r;
            signal[r] = generate(d);
            h_multi[r] = estimate(signal[r], cfg);
        } catch (const std::exception& e) {
            signal_error[r] = e.what();
        }
    });

    // Phase 2: (noise, snr, replicate) cells.
    struct Cell {
        std::vector<double> h;
        std::vector<std::uint8_t> defined;
        double deviation = kNan;
        bool dev_ok = false;
        bool failed = false;
        std::string error;
    };
    std::vector<Cell> cells(n_noise * n_snr * reps);
    auto cell_index = [=](std::size_t i, std::size_t j, std::size_t r) {
        return (i * n_snr + j) * reps + r;
    };
    parallel_for(cells.size(), [&](std::size_t c) {
        const std::size_t r = c % reps;
        const std::size_t j = (c / reps) % n_snr;
        const std::size_t i = c / (reps * n_snr);
        Cell& cell = cells[c];
        if (!signal_error[r].empty()) {
            cell.failed = true;
            cell.error = "signal: " + signal_error[r];
            return;
        }
        try {
            ModelDescriptor nd = cfg.noise_models[i].desc;
            nd.seed = cell_seed(cfg.base_seed, i, j, r);
            const Series noise = generate(nd);
            const MixResult mixed = mix(signal[r], noise, MixSpec{cfg.snr_levels[j]});
            const HurstSpectrum h_sum = estimate(mixed.sum, cfg);
            cell.h = h_sum.h;
            cell.defined.resize(nq);
            for (std::size_t k = 0; k < nq; ++k) cell.defined[k] = h_sum.defined[k] ? 1 : 0;
            try {
                cell.deviation = spectrum_deviation(h_sum, h_multi[r], cfg.deviation_q_min,
                                                    cfg.deviation_q_max);
                cell.dev_ok = true;
            } catch (const std::exception& e) {
                cell.error = std::string("deviation: ") + e.what();
            }
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.error = e.what();
        }
    });

    // Aggregation in fixed (noise, snr, q) order.
    ResultsTable table;
    table.q = cfg.q.values;
    table.snr_levels = cfg.snr_levels;
    for (const auto& nm : cfg.noise_models) table.noise_labels.push_back(nm.label);

    std::vector<double> h_multi_mean(nq, kNan);
    for (std::size_t k = 0; k < nq; ++k) {
        std::vector<double> vals;
        for (std::size_t r = 0; r < reps; ++r) {
            if (signal_error[r].empty() && h_multi[r].defined[k]) {
                vals.push_back(h_multi[r].h[k]);
            }
        }
        if (!vals.empty()) h_multi_mean[k] = mean(vals);
    }

    for (std::size_t i = 0; i < n_noise; ++i) {
        for (std::size_t j = 0; j < n_snr; ++j) {
            std::vector<double> devs;
            for (std::size_t r = 0; r < reps; ++r) {
                const Cell& cell = cells[cell_index(i, j, r)];
                if (!cell.error.empty() || cell.failed) {
                    table.failures.push_back(FailureRow{cfg.noise_models[i].label,
                                                        cfg.snr_levels[j], static_cast<int>(r),
                                                        cell.error});
                }
                if (cell.dev_ok) devs.push_back(cell.deviation);
            }
            for (std::size_t k = 0; k < nq; ++k) {
                std::vector<double> vals;
                for (std::size_t r = 0; r < reps; ++r) {
                    const Cell& cell = cells[cell_index(i, j, r)];
                    if (!cell.failed && cell.defined[k]) vals.push_back(cell.h[k]);
                }
                SpectrumRow row;
                row.noise_label = cfg.noise_models[i].label;
                row.snr = cfg.snr_levels[j];
                row.q = cfg.q.values[k];
                row.h_sum_mean = vals.empty() ? kNan : mean(vals);
                row.h_sum_std = sample_std(vals);
                row.h_multi_mean = h_multi_mean[k];
                row.defined_fraction = static_cast<double>(vals.size()) / static_cast<double>(reps);
                table.rows.push_back(std::move(row));
            }
            SummaryRow srow;
            srow.noise_label = cfg.noise_models[i].label;
            srow.snr = cfg.snr_levels[j];
            srow.deviation_mean = devs.empty() ? kNan : mean(devs);
            srow.deviation_std = std_error(devs);
            table.summary.push_back(std::move(srow));
        }
    }
    return table;
}

void emit_results(const ResultsTable& t, const std::filesystem::path& out_dir) {
    if (t.rows.empty()) {
        throw ContractError("emit_results: empty table");
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    }

    {
        const auto path = out_dir / "results.csv";
        std::ofstream out(path);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        for (const auto& f : t.failures) {
            out << "# failure noise=" << f.noise_label << " snr=" << fmt_snr(f.snr)
                << " replicate=" << f.replicate << " error=" << f.message << "\n";
        }
        out << "noise,snr,q,h_sum_mean,h_sum_std,h_multi_mean,defined_fraction\n";
        for (const auto& r : t.rows) {
            out << r.noise_label << "," << format_value(r.snr) << "," << format_value(r.q) << ","
                << format_value(r.h_sum_mean) << "," << format_value(r.h_sum_std) << ","
                << format_value(r.h_multi_mean) << "," << format_value(r.defined_fraction)
                << "\n";
        }
        out.flush();
        if (!out) throw IoError("write failed: " + path.string());
    }

    {
        const auto path = out_dir / "summary.csv";
        std::ofstream out(path);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        out << "noise,snr,deviation_mean,deviation_std\n";
        for (const auto& r : t.summary) {
            out << r.noise_label << "," << format_value(r.snr) << ","
                << format_value(r.deviation_mean) << "," << format_value(r.deviation_std) << "\n";
        }
        out.flush();
        if (!out) throw IoError("write failed: " + path.string());
    }

    for (std::size_t i = 0; i < t.noise_labels.size(); ++i) {
        const auto path = out_dir / ("fig" + std::to_string(i + 1) + "_" + t.noise_labels[i] +
                                     ".csv");
        std::ofstream out(path);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        out << "q,h_multi";
        for (double snr : t.snr_levels) {
            out << ",h_sum_snr_" << fmt_snr(snr);
        }
        out << "\n";
        const std::size_t nq = t.q.size();
        for (std::size_t k = 0; k < nq; ++k) {
            // rows are laid out as (noise, snr, q)
            const SpectrumRow& base = t.rows[(i * t.snr_levels.size()) * nq + k];
            out << format_value(base.q) << "," << format_value(base.h_multi_mean);
            for (std::size_t j = 0; j < t.snr_levels.size(); ++j) {
                const SpectrumRow& row = t.rows[(i * t.snr_levels.size() + j) * nq + k];
                out << "," << format_value(row.h_sum_mean);
            }
            out << "\n";
        }
        out.flush();
        if (!out) throw IoError("write failed: " + path.string());
    }
}

}  // namespace mftraffic
