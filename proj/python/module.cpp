#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mftraffic/errors.hpp"

#include "mftraffic/analysis.hpp"
#include "mftraffic/config.hpp"
#include "mftraffic/experiment.hpp"
#include "mftraffic/generators.hpp"
#include "mftraffic/mixer.hpp"

namespace py = pybind11;
using namespace mftraffic;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    // the (count, data) form copies; no base object is passed
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

Series to_series(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    Series s;
    s.values.assign(a.data(), a.data() + a.size());
    return s;
}

QGrid to_qgrid(const std::optional<std::vector<double>>& q) {
    if (!q) return QGrid::range(0.5, 10.0, 0.5);
    QGrid g;
    g.values = *q;
    g.validate();
    return g;
}

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::dict spectrum_dict(const HurstSpectrum& s) {
    py::dict d;
    d["q"] = to_array(s.q.values);
    d["h"] = to_array(s.h);
    d["intercept"] = to_array(s.intercept);
    d["r2"] = to_array(s.r2);
    py::list defined;
    for (bool b : s.defined) defined.append(b);
    d["defined"] = defined;
    d["method"] = method_name(s.method);
    d["warnings"] = s.warnings;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Self-similar and multifractal traffic synthesis, additive mixing at a controlled "
              "variance SNR, and generalized Hurst exponent estimation";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParameterError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const DomainError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const ContractError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const IoError& e) {
            PyErr_SetString(PyExc_OSError, e.what());
        }
    });

    m.def(
        "gen_fgn",
        [](std::size_t n, double hurst, std::uint64_t seed) {
            return to_array(gen_fgn(n, hurst, seed).values);
        },
        py::arg("n"), py::arg("hurst"), py::arg("seed"),
        "Fractional Gaussian noise via circulant embedding (exact in distribution).");
    m.def(
        "gen_fbm",
        [](std::size_t n, double hurst, std::uint64_t seed) {
            return to_array(gen_fbm(n, hurst, seed).values);
        },
        py::arg("n"), py::arg("hurst"), py::arg("seed"),
        "Fractional Brownian motion (cumulative sum of gen_fgn).");
    m.def(
        "exp_transform", [](const Array& x) { return to_array(exp_transform(to_series(x)).values); },
        py::arg("x"), "Elementwise exponential (positive, log-normal traffic).");
    m.def(
        "gen_cascade",
        [](int depth, double alpha, std::uint64_t seed) {
            return to_array(gen_cascade(depth, alpha, seed).values);
        },
        py::arg("depth"), py::arg("alpha"), py::arg("seed"),
        "Conservative binomial cascade with Beta(alpha,alpha) weights; mean-1 leaf masses.");
    m.def(
        "gen_ar1",
        [](std::size_t n, double phi, double sigma, std::uint64_t seed) {
            return to_array(gen_ar1(n, phi, sigma, seed).values);
        },
        py::arg("n"), py::arg("phi"), py::arg("sigma"), py::arg("seed"),
        "Stationary AR(1) series.");
    m.def(
        "gen_iid",
        [](std::size_t n, const std::string& dist, double p1, double p2, std::uint64_t seed) {
            DistSpec ds;
            ds.kind = dist_from_name(dist);
            ds.p1 = p1;
            ds.p2 = p2;
            return to_array(gen_iid(n, ds, seed).values);
        },
        py::arg("n"), py::arg("dist"), py::arg("p1"), py::arg("p2"), py::arg("seed"),
        "Iid draws; dist is uniform(lo,hi), normal(mean,stdev) or lognormal(mu,sigma).");

    m.def("beta_moment", &beta_moment, py::arg("q"), py::arg("alpha"),
          "E[W^q] for W ~ Beta(alpha, alpha).");
    m.def("cascade_theoretical_h", &cascade_theoretical_h, py::arg("q"), py::arg("alpha"),
          "Analytic h(q) of the Beta-weight cascade, -log2(E[W^q])/q.");

    m.def(
        "mfdfa",
        [](const Array& x, const std::optional<std::vector<double>>& q,
           const std::optional<std::vector<int>>& scales, int detrend_order) {
            const Series s = to_series(x);
            ScalePlan plan = scales ? ScalePlan{*scales, detrend_order}
                                    : ScalePlan::default_mfdfa(s.size(), detrend_order);
            return spectrum_dict(mfdfa(s, to_qgrid(q), plan));
        },
        py::arg("x"), py::arg("q") = std::nullopt, py::arg("scales") = std::nullopt,
        py::arg("detrend_order") = 2,
        "Multifractal detrended fluctuation analysis; returns a dict of arrays.");
    m.def(
        "moment_spectrum",
        [](const Array& x, const std::optional<std::vector<double>>& q,
           const std::optional<std::vector<int>>& scales) {
            const Series s = to_series(x);
            const std::vector<int> sc = scales ? *scales : default_moment_scales(s.size());
            return spectrum_dict(moment_spectrum(s, to_qgrid(q), sc));
        },
        py::arg("x"), py::arg("q") = std::nullopt, py::arg("scales") = std::nullopt,
        "Block-sum moment scaling estimate of h(q); returns a dict of arrays.");
    m.def(
        "hurst_h2", [](const Array& x) { return hurst_h2(to_series(x)); }, py::arg("x"),
        "MFDFA h(2) with the default plan.");

    m.def(
        "mix",
        [](const Array& multi, const Array& noise, double snr) {
            const MixResult r = mix(to_series(multi), to_series(noise), MixSpec{snr});
            py::dict d;
            d["sum"] = to_array(r.sum.values);
            d["noise_scale"] = r.noise_scale;
            d["achieved_snr"] = r.achieved_snr;
            return d;
        },
        py::arg("multi"), py::arg("noise"), py::arg("snr"),
        "Additive mix at an exact variance SNR; returns sum, noise_scale, achieved_snr.");
    m.def(
        "measure_snr",
        [](const Array& multi, const Array& noise) {
            return measure_snr(to_series(multi), to_series(noise));
        },
        py::arg("multi"), py::arg("noise"), "Sample-variance ratio Var[multi]/Var[noise].");

    m.def(
        "run_experiment",
        [](const std::string& config_path, const std::string& out_dir) {
            const ResultsTable t = run_sweep(load_experiment_config(config_path));
            emit_results(t, out_dir);
            py::list summary;
            for (const auto& row : t.summary) {
                py::dict d;
                d["noise"] = row.noise_label;
                d["snr"] = row.snr;
                d["deviation_mean"] = row.deviation_mean;
                d["deviation_std"] = row.deviation_std;
                summary.append(d);
            }
            return summary;
        },
        py::arg("config_path"), py::arg("out_dir"),
        "Run a sweep config, write the result CSVs, return the deviation summary.");

#ifdef MFTRAFFIC_VERSION_INFO
    m.attr("__version__") = MFTRAFFIC_VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
