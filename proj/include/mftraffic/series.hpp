#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mftraffic {

enum class Model { Fgn, Fbm, ExpFgn, Cascade, Ar1, Iid };

enum class Dist { Uniform, Normal, Lognormal };

/// Two-parameter marginal distribution for iid generation.
///   Uniform:   p1 = lower bound, p2 = upper bound (p1 < p2)
///   Normal:    p1 = mean, p2 = standard deviation (> 0)
///   Lognormal: p1 = mu, p2 = sigma of the underlying normal (> 0)
struct DistSpec {
    Dist kind = Dist::Uniform;
    double p1 = 0.0;
    double p2 = 1.0;

    void validate() const;

    bool operator==(const DistSpec&) const = default;
};

/// Full recipe for one synthetic series. Regenerating with an identical
/// descriptor (including seed) yields bit-identical values.
///
/// Exactly the fields relevant to `model` may be set; validate() rejects
/// missing or extraneous parameters. For Cascade, n is derived as 2^depth.
struct ModelDescriptor {
    Model model = Model::Fgn;
    std::optional<double> hurst;    // Fgn / Fbm / ExpFgn, in (0,1)
    std::optional<double> alpha;    // Cascade beta-weight shape, > 0
    std::optional<int> depth;       // Cascade level count, >= 1
    std::optional<double> phi;      // Ar1 coefficient, |phi| < 1
    std::optional<double> sigma;    // Ar1 innovation stdev, > 0
    std::optional<DistSpec> dist;   // Iid only
    std::size_t n = 0;              // requested length (2^depth for Cascade)
    std::uint64_t seed = 0;

    void validate() const;

    bool operator==(const ModelDescriptor&) const = default;
};

/// A finite real-valued sample path plus the recipe that produced it.
/// Series loaded from files or produced by mixing carry no descriptor.
struct Series {
    std::vector<double> values;
    std::optional<ModelDescriptor> meta;

    std::size_t size() const { return values.size(); }
};

std::string model_name(Model m);
Model model_from_name(const std::string& name);
std::string dist_name(Dist d);
Dist dist_from_name(const std::string& name);

/// Key/value form of a descriptor, as used in trace-file comments and the
/// experiment config. Keys: model, n, seed, hurst, alpha, depth, phi, sigma,
/// dist, lo/hi (uniform), mean/stdev (normal), mu/sigma (lognormal).
std::vector<std::pair<std::string, std::string>> descriptor_to_kv(const ModelDescriptor& d);
ModelDescriptor descriptor_from_kv(const std::vector<std::pair<std::string, std::string>>& kv,
                                   const std::string& context);

}  // namespace mftraffic
