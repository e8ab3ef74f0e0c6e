#include "mftraffic/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mftraffic/errors.hpp"

namespace mftraffic {

namespace {

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

/// `# key=value` -> (key, value); returns false for plain comments.
bool parse_meta_line(const std::string& line, std::string& key, std::string& value) {
    std::string body = strip(line.substr(1));
    const auto eq = body.find('=');
    if (eq == std::string::npos) return false;
    key = strip(body.substr(0, eq));
    value = strip(body.substr(eq + 1));
    return !key.empty();
}

double parse_double(const std::string& s, const std::filesystem::path& p, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError(p.string() + ":" + std::to_string(line_no) + ": not a number: '" + s + "'");
    }
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot open " + p.string() + " for writing");
    return out;
}

void finish_out(std::ofstream& out, const std::filesystem::path& p) {
    out.flush();
    if (!out) throw IoError("write failed: " + p.string());
}

}  // namespace

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trace(const std::filesystem::path& p, const std::vector<double>& values,
                 const MetaKv& meta) {
    auto out = open_out(p);
    for (const auto& [k, v] : meta) {
        out << "# " << k << "=" << v << "\n";
    }
    out << "value\n";
    for (double v : values) {
        out << format_value(v) << "\n";
    }
    finish_out(out, p);
}

Trace read_trace(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open " + p.string());
    Trace t;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = strip(line);
        if (s.empty()) continue;
        if (s[0] == '#') {
            if (header_seen) {
                throw IoError(p.string() + ":" + std::to_string(line_no) +
                              ": comment after header");
            }
            std::string k;
            std::string v;
            if (parse_meta_line(s, k, v)) t.meta.emplace_back(k, v);
            continue;
        }
        if (!header_seen) {
            if (s != "value") {
                throw IoError(p.string() + ":" + std::to_string(line_no) +
                              ": expected header 'value', got '" + s + "'");
            }
            header_seen = true;
            continue;
        }
        const double v = parse_double(s, p, line_no);
        if (!std::isfinite(v)) {
            throw IoError(p.string() + ":" + std::to_string(line_no) + ": value not finite");
        }
        t.values.push_back(v);
    }
    if (!header_seen) {
        throw IoError(p.string() + ": missing 'value' header");
    }
    if (t.values.size() < 2) {
        throw IoError(p.string() + ": a trace needs at least two values");
    }
    return t;
}

MetaKv meta_from_series(const Series& s) {
    if (s.meta) return descriptor_to_kv(*s.meta);
    return {};
}

MetaKv prefixed(const MetaKv& meta, const std::string& prefix) {
    MetaKv out;
    out.reserve(meta.size());
    for (const auto& [k, v] : meta) {
        out.emplace_back(prefix + k, v);
    }
    return out;
}

ModelDescriptor descriptor_from_meta(const MetaKv& meta) {
    return descriptor_from_kv(meta, "trace metadata");
}

void write_spectrum(const std::filesystem::path& p, const HurstSpectrum& s,
                    const std::vector<int>& scales, int detrend_order,
                    const MetaKv& input_meta) {
    auto out = open_out(p);
    out << "# method=" << method_name(s.method) << "\n";
    out << "# scales=";
    for (std::size_t i = 0; i < scales.size(); ++i) {
        out << (i ? " " : "") << scales[i];
    }
    out << "\n";
    if (s.method == EstimatorMethod::Mfdfa) {
        out << "# detrend_order=" << detrend_order << "\n";
    }
    for (const auto& [k, v] : input_meta) {
        out << "# input." << k << "=" << v << "\n";
    }
    out << "q,h,intercept,r2,defined\n";
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        out << format_value(s.q.values[i]) << "," << format_value(s.h[i]) << ","
            << format_value(s.intercept[i]) << "," << format_value(s.r2[i]) << ","
            << (s.defined[i] ? 1 : 0) << "\n";
    }
    finish_out(out, p);
}

HurstSpectrum read_spectrum(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open " + p.string());
    HurstSpectrum s;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = strip(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            std::string k;
            std::string v;
            if (parse_meta_line(t, k, v) && k == "method") {
                s.method = method_from_name(v);
            }
            continue;
        }
        if (!header_seen) {
            if (t != "q,h,intercept,r2,defined") {
                throw IoError(p.string() + ":" + std::to_string(line_no) +
                              ": unexpected spectrum header '" + t + "'");
            }
            header_seen = true;
            continue;
        }
        std::istringstream row(t);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(strip(field));
        if (fields.size() != 5) {
            throw IoError(p.string() + ":" + std::to_string(line_no) + ": expected 5 columns");
        }
        s.q.values.push_back(parse_double(fields[0], p, line_no));
        s.h.push_back(parse_double(fields[1], p, line_no));
        s.intercept.push_back(parse_double(fields[2], p, line_no));
        s.r2.push_back(parse_double(fields[3], p, line_no));
        s.defined.push_back(fields[4] == "1");
    }
    if (!header_seen) throw IoError(p.string() + ": missing spectrum header");
    s.q.validate();
    return s;
}

}  // namespace mftraffic
