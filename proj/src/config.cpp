#include "mftraffic/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "mftraffic/errors.hpp"

namespace mftraffic {

namespace {

struct Entry {
    std::string value;
    std::size_t line = 0;
    bool used = false;
};

struct Section {
    std::string name;  // "signal", "noise <label>", "sweep", ...
    std::size_t line = 0;
    std::map<std::string, Entry> entries;
};

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& field,
                       const std::string& msg) {
    std::string where = origin;
    if (line) where += ":" + std::to_string(line);
    throw ParameterError(where + ": [" + field + "] " + msg);
}

class ConfigDoc {
public:
    ConfigDoc(const std::string& text, std::string origin) : origin_(std::move(origin)) {
        std::istringstream in(text);
        std::string line;
        std::size_t line_no = 0;
        Section* current = nullptr;
        while (std::getline(in, line)) {
            ++line_no;
            std::string s = strip(line);
            const auto hash = s.find('#');
            if (hash != std::string::npos) s = strip(s.substr(0, hash));
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']') {
                    fail(origin_, line_no, "config", "unterminated section header '" + s + "'");
                }
                Section sec;
                sec.name = strip(s.substr(1, s.size() - 2));
                sec.line = line_no;
                if (sec.name.empty()) {
                    fail(origin_, line_no, "config", "empty section name");
                }
                sections_.push_back(std::move(sec));
                current = &sections_.back();
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                fail(origin_, line_no, "config", "expected 'key = value', got '" + s + "'");
            }
            if (!current) {
                fail(origin_, line_no, "config", "key outside any [section]");
            }
            const std::string key = strip(s.substr(0, eq));
            const std::string value = strip(s.substr(eq + 1));
            if (key.empty() || value.empty()) {
                fail(origin_, line_no, current->name + "." + key, "empty key or value");
            }
            if (!current->entries.emplace(key, Entry{value, line_no, false}).second) {
                fail(origin_, line_no, current->name + "." + key, "duplicate key");
            }
        }
    }

    const std::string& origin() const { return origin_; }

    Section* find(const std::string& name) {
        for (auto& s : sections_) {
            if (s.name == name) return &s;
        }
        return nullptr;
    }

    std::vector<Section*> noise_sections() {
        std::vector<Section*> out;
        for (auto& s : sections_) {
            if (s.name.rfind("noise ", 0) == 0) out.push_back(&s);
        }
        return out;
    }

    void check_known_sections() const {
        for (const auto& s : sections_) {
            const bool known = s.name == "signal" || s.name == "sweep" || s.name == "q" ||
                               s.name == "estimator" || s.name == "scales" ||
                               s.name == "deviation" || s.name.rfind("noise ", 0) == 0;
            if (!known) {
                fail(origin_, s.line, s.name, "unknown section");
            }
        }
    }

    void check_all_used() const {
        for (const auto& s : sections_) {
            for (const auto& [key, e] : s.entries) {
                if (!e.used) {
                    fail(origin_, e.line, s.name + "." + key, "unknown key");
                }
            }
        }
    }

private:
    std::string origin_;
    std::vector<Section> sections_;
};

class SectionReader {
public:
    SectionReader(ConfigDoc& doc, Section* sec, std::string display)
        : doc_(doc), sec_(sec), display_(std::move(display)) {}

    bool present() const { return sec_ != nullptr; }

    std::optional<std::string> get(const std::string& key) {
        if (!sec_) return std::nullopt;
        auto it = sec_->entries.find(key);
        if (it == sec_->entries.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    std::string require(const std::string& key) {
        auto v = get(key);
        if (!v) {
            fail(doc_.origin(), sec_ ? sec_->line : 0, display_ + "." + key, "missing key");
        }
        return *v;
    }

    double number(const std::string& key, const std::string& raw) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(raw, &pos);
            if (pos != raw.size() || !std::isfinite(v)) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            fail(doc_.origin(), sec_ ? sec_->line : 0, display_ + "." + key,
                 "not a number: '" + raw + "'");
        }
    }

    std::optional<double> opt_number(const std::string& key) {
        auto v = get(key);
        if (!v) return std::nullopt;
        return number(key, *v);
    }

    double number_or(const std::string& key, double fallback) {
        return opt_number(key).value_or(fallback);
    }

    long integer(const std::string& key, const std::string& raw) {
        const double v = number(key, raw);
        const double r = std::nearbyint(v);
        if (v != r) {
            fail(doc_.origin(), sec_ ? sec_->line : 0, display_ + "." + key,
                 "expected an integer, got '" + raw + "'");
        }
        return static_cast<long>(r);
    }

    std::vector<double> number_list(const std::string& key, const std::string& raw) {
        std::istringstream in(raw);
        std::vector<double> out;
        std::string tok;
        while (in >> tok) out.push_back(number(key, tok));
        if (out.empty()) {
            fail(doc_.origin(), sec_ ? sec_->line : 0, display_ + "." + key, "empty list");
        }
        return out;
    }

    const std::string& display() const { return display_; }

private:
    ConfigDoc& doc_;
    Section* sec_;
    std::string display_;
};

ModelDescriptor descriptor_from_section(ConfigDoc& doc, SectionReader& r, std::size_t n,
                                        std::uint64_t seed) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("model", r.require("model"));
    kv.emplace_back("n", std::to_string(n));
    kv.emplace_back("seed", std::to_string(seed));
    for (const char* key : {"hurst", "alpha", "depth", "phi", "sigma", "dist", "lo", "hi",
                            "mean", "stdev", "mu"}) {
        if (auto v = r.get(key)) kv.emplace_back(key, *v);
    }
    try {
        return descriptor_from_kv(kv, r.display());
    } catch (const ParameterError& e) {
        throw ParameterError(doc.origin() + ": " + e.what());
    }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& origin) {
    ConfigDoc doc(text, origin);
    doc.check_known_sections();

    ExperimentConfig cfg;

    Section* sweep_sec = doc.find("sweep");
    SectionReader sweep(doc, sweep_sec, "sweep");
    if (auto v = sweep.get("base_seed")) {
        cfg.base_seed = static_cast<std::uint64_t>(sweep.integer("base_seed", *v));
    }
    if (auto v = sweep.get("replicates")) {
        cfg.replicates = static_cast<int>(sweep.integer("replicates", *v));
    }
    if (auto v = sweep.get("snr_levels")) {
        cfg.snr_levels = sweep.number_list("snr_levels", *v);
    } else {
        cfg.snr_levels = {1.0, 2.0, 4.0, 5.0, 10.0};
    }

    Section* signal_sec = doc.find("signal");
    if (!signal_sec) {
        fail(origin, 0, "signal", "missing [signal] section");
    }
    SectionReader signal(doc, signal_sec, "signal");
    {
        // length is derived: cascade n = 2^depth
        auto model = signal.require("model");
        if (model != "cascade") {
            fail(origin, signal_sec->line, "signal.model",
                 "experiment signal must be cascade, got '" + model + "'");
        }
        const long depth = signal.integer("depth", signal.require("depth"));
        if (depth < 1 || depth > 24) {
            fail(origin, signal_sec->line, "signal.depth", "depth must be in [1, 24]");
        }
        ModelDescriptor d;
        d.model = Model::Cascade;
        d.depth = static_cast<int>(depth);
        d.alpha = signal.number("alpha", signal.require("alpha"));
        d.n = std::size_t{1} << depth;
        d.seed = cfg.base_seed;
        cfg.base_signal = d;
    }

    const auto noise_secs = doc.noise_sections();
    if (noise_secs.empty()) {
        fail(origin, 0, "noise", "at least one [noise <label>] section is required");
    }
    for (Section* sec : noise_secs) {
        NoiseModel nm;
        nm.label = strip(sec->name.substr(6));
        SectionReader r(doc, sec, "noise " + nm.label);
        nm.desc = descriptor_from_section(doc, r, cfg.base_signal.n, 0);
        cfg.noise_models.push_back(std::move(nm));
    }

    SectionReader qsec(doc, doc.find("q"), "q");
    {
        const double qmin = qsec.number_or("min", 0.5);
        const double qmax = qsec.number_or("max", 10.0);
        const double qstep = qsec.number_or("step", 0.5);
        try {
            cfg.q = QGrid::range(qmin, qmax, qstep);
        } catch (const ParameterError& e) {
            fail(origin, 0, "q", e.what());
        }
    }

    SectionReader est(doc, doc.find("estimator"), "estimator");
    if (auto v = est.get("method")) {
        try {
            cfg.method = method_from_name(*v);
        } catch (const ParameterError& e) {
            fail(origin, 0, "estimator.method", e.what());
        }
    }
    int detrend_order = 2;
    if (auto v = est.get("detrend_order")) {
        detrend_order = static_cast<int>(est.integer("detrend_order", *v));
    }

    Section* scales_sec = doc.find("scales");
    SectionReader scales(doc, scales_sec, "scales");
    const std::size_t n = cfg.base_signal.n;
    if (scales_sec) {
        const long smin = scales.integer("min", scales.require("min"));
        const long smax = scales.integer("max", scales.require("max"));
        const long count = scales.integer("count", scales.require("count"));
        if (smin < 2 || smax <= smin || count < 2) {
            fail(origin, scales_sec->line, "scales",
                 "need min >= 2, max > min, count >= 2");
        }
        const double lo = std::log(static_cast<double>(smin));
        const double hi = std::log(static_cast<double>(smax));
        cfg.plan.scales.clear();
        for (long i = 0; i < count; ++i) {
            const int s = static_cast<int>(std::lround(std::exp(lo + (hi - lo) * i / (count - 1))));
            if (cfg.plan.scales.empty() || s > cfg.plan.scales.back()) {
                cfg.plan.scales.push_back(s);
            }
        }
        cfg.plan.detrend_order = detrend_order;
    } else if (cfg.method == EstimatorMethod::Mfdfa) {
        try {
            cfg.plan = ScalePlan::default_mfdfa(n, detrend_order);
        } catch (const Error& e) {
            fail(origin, 0, "scales", e.what());
        }
    } else {
        cfg.plan.scales = default_moment_scales(n);
        cfg.plan.detrend_order = detrend_order;
    }

    SectionReader dev(doc, doc.find("deviation"), "deviation");
    cfg.deviation_q_min = dev.number_or("q_min", 0.5);
    cfg.deviation_q_max = dev.number_or("q_max", 10.0);

    doc.check_all_used();
    try {
        cfg.validate();
    } catch (const ParameterError& e) {
        throw ParameterError(origin + ": " + e.what());
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) {
        throw ParameterError("cannot open config file " + p.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str(), p.string());
}

}  // namespace mftraffic
