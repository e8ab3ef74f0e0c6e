#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mftraffic/analysis.hpp"
#include "mftraffic/series.hpp"

namespace mftraffic {

/// Ordered key/value metadata carried in `# key=value` comment lines.
using MetaKv = std::vector<std::pair<std::string, std::string>>;

struct Trace {
    std::vector<double> values;
    MetaKv meta;
};

/// Trace CSV: `# key=value` comments, a `value` header, then one value per
/// line with 17 significant digits (lossless double round trip).
void write_trace(const std::filesystem::path& p, const std::vector<double>& values,
                 const MetaKv& meta);
Trace read_trace(const std::filesystem::path& p);

/// Series -> Trace helpers. A generated series contributes its descriptor;
/// prefix nests parent metadata (signal., noise.) in mixed traces.
MetaKv meta_from_series(const Series& s);
MetaKv prefixed(const MetaKv& meta, const std::string& prefix);

/// Reconstruct a descriptor from trace metadata (round-trip support).
ModelDescriptor descriptor_from_meta(const MetaKv& meta);

/// Spectrum CSV: comments recording method, scales, detrend order (MFDFA)
/// and the input trace's metadata, then `q,h,intercept,r2,defined` rows.
void write_spectrum(const std::filesystem::path& p, const HurstSpectrum& s,
                    const std::vector<int>& scales, int detrend_order,
                    const MetaKv& input_meta);
HurstSpectrum read_spectrum(const std::filesystem::path& p);

/// 17-significant-digit representation used across all file formats.
std::string format_value(double v);

}  // namespace mftraffic
