#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mftraffic/analysis.hpp"
#include "mftraffic/series.hpp"

namespace mftraffic {

struct NoiseModel {
    std::string label;  // filename-safe: [A-Za-z0-9_-]
    ModelDescriptor desc;
};

/// Sweep definition: noise kinds x SNR levels x replicates. Replicate r of
/// the signal uses seed base_seed + r; each (noise, snr, replicate) cell
/// draws its noise from an independent splitmix64-derived seed.
struct ExperimentConfig {
    ModelDescriptor base_signal;
    std::vector<NoiseModel> noise_models;
    std::vector<double> snr_levels;  // strictly increasing, > 0
    int replicates = 20;
    QGrid q;
    ScalePlan plan;
    EstimatorMethod method = EstimatorMethod::Mfdfa;
    std::uint64_t base_seed = 42;
    double deviation_q_min = 0.5;
    double deviation_q_max = 10.0;

    void validate() const;
};

struct SpectrumRow {
    std::string noise_label;
    double snr = 0.0;
    double q = 0.0;
    double h_sum_mean = 0.0;
    double h_sum_std = 0.0;
    double h_multi_mean = 0.0;
    double defined_fraction = 1.0;  // defined estimates / replicates
};

struct SummaryRow {
    std::string noise_label;
    double snr = 0.0;
    double deviation_mean = 0.0;
    double deviation_std = 0.0;
};

struct FailureRow {
    std::string noise_label;
    double snr = 0.0;
    int replicate = 0;
    std::string message;
};

struct ResultsTable {
    std::vector<double> q;
    std::vector<double> snr_levels;
    std::vector<std::string> noise_labels;
    std::vector<SpectrumRow> rows;      // one per (noise, snr, q)
    std::vector<SummaryRow> summary;    // one per (noise, snr)
    std::vector<FailureRow> failures;   // skipped cells; sweep continues
};

/// Run the full sweep. Deterministic given the config; cells run on a small
/// thread pool (width from MFTRAFFIC_THREADS, default hardware concurrency)
/// with a fixed aggregation order, so results never depend on scheduling.
ResultsTable run_sweep(const ExperimentConfig& cfg);

/// Write results.csv (full table), summary.csv (deviation rows), and one
/// plot-ready fig<N>_<noise_label>.csv per noise model with columns
/// q, h_multi, then one h_sum column per SNR level.
void emit_results(const ResultsTable& t, const std::filesystem::path& out_dir);

}  // namespace mftraffic
