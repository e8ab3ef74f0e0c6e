#include "mftraffic/mixer.hpp"

#include <cmath>
#include <string>

#include "mftraffic/errors.hpp"
#include "mftraffic/stats.hpp"

namespace mftraffic {

MixResult mix(const Series& multi, const Series& noise, const MixSpec& spec) {
    if (multi.size() != noise.size()) {
        throw ContractError("mix: length mismatch, " + std::to_string(multi.size()) + " vs " +
                            std::to_string(noise.size()));
    }
    if (!(spec.snr > 0.0) || !std::isfinite(spec.snr)) {
        throw ParameterError("mix: snr must be finite and > 0");
    }
    const double var_multi = variance(multi.values);
    const double var_noise = variance(noise.values);
    if (var_multi <= 0.0) {
        throw DegenerateInputError("mix: signal has zero variance");
    }
    if (var_noise <= 0.0) {
        throw DegenerateInputError("mix: noise has zero variance");
    }

    const double c = std::sqrt(var_multi / (spec.snr * var_noise));
    MixResult r;
    r.noise_scale = c;
    r.sum.values.resize(multi.size());
    std::vector<double> scaled(noise.size());
    for (std::size_t i = 0; i < multi.size(); ++i) {
        scaled[i] = c * noise.values[i];
        r.sum.values[i] = multi.values[i] + scaled[i];
    }
    r.achieved_snr = var_multi / variance(scaled);
    return r;
}

double measure_snr(const Series& multi, const Series& noise_component) {
    if (multi.size() != noise_component.size()) {
        throw ContractError("measure_snr: length mismatch, " + std::to_string(multi.size()) +
                            " vs " + std::to_string(noise_component.size()));
    }
    const double var_noise = variance(noise_component.values);
    if (var_noise <= 0.0) {
        throw DegenerateInputError("measure_snr: noise component has zero variance");
    }
    return variance(multi.values) / var_noise;
}

}  // namespace mftraffic
