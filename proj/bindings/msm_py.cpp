#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "msm/data.hpp"
#include "msm/errors.hpp"
#include "msm/model.hpp"
#include "msm/moments.hpp"
#include "msm/monte_carlo.hpp"
#include "msm/rng.hpp"
#include "msm/scaling.hpp"
#include "msm/series.hpp"

namespace py = pybind11;

namespace {

msm::ReturnSeries as_returns(const std::vector<double>& values) {
    msm::ReturnSeries r;
    r.values = values;
    r.transform = msm::Transform::raw;
    msm::validate(r);
    return r;
}

msm::GheMode parse_mode(const std::string& s) {
    if (s == "integrated") return msm::GheMode::integrated;
    if (s == "raw") return msm::GheMode::raw;
    throw msm::ValidationError("mode must be 'integrated' or 'raw'");
}

msm::LoDenominator parse_denominator(const std::string& s) {
    if (s == "newey_west") return msm::LoDenominator::newey_west;
    if (s == "newey_west_zero_lag") return msm::LoDenominator::newey_west_zero_lag;
    throw msm::ValidationError("denominator must be 'newey_west' or 'newey_west_zero_lag'");
}

msm::MsmParams make_params(double m0, double sigma, int k, double gamma_k, double b) {
    msm::MsmParams p;
    p.m0 = m0;
    p.sigma = sigma;
    p.k = k;
    p.gamma_k = gamma_k;
    p.b = b;
    return p;
}

py::dict lo_dict(const msm::LoResult& l) {
    py::dict d;
    d["tau"] = l.tau;
    d["q_stat"] = l.q_stat;
    d["v_stat"] = l.v_stat;
    d["h"] = l.h;
    d["reject_95"] = l.reject_95;
    d["reject_99"] = l.reject_99;
    return d;
}

py::dict ghe_dict(const msm::GheResult& g) {
    py::dict d;
    d["q"] = g.q;
    d["h"] = g.h;
    d["h_std"] = g.h_std;
    d["tau_max_set"] = g.tau_max_set;
    d["mode"] = std::string(msm::to_string(g.mode));
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Markov-switching multifractal volatility toolkit";
    m.attr("__version__") = MSM_VERSION;

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const msm::IoError& e) {
            PyErr_SetString(PyExc_OSError, e.what());
        } catch (const msm::NumericalError& e) {
            PyErr_SetString(PyExc_ArithmeticError, e.what());
        }
        // ValidationError derives from std::invalid_argument and maps to
        // ValueError through the default translator
    });

    m.def("mix64", &msm::mix64, py::arg("x"), "64-bit finalizer used for seed derivation");
    m.def("derive_seed", &msm::derive_seed, py::arg("master"), py::arg("k"), py::arg("rep"),
          "Replication seed derived from a master seed");

    m.def(
        "simulate",
        [](double m0, double sigma, int k, std::size_t T, std::uint64_t seed, std::size_t burn_in,
           double gamma_k, double b) {
            return msm::simulate(make_params(m0, sigma, k, gamma_k, b), T, seed, burn_in).values;
        },
        py::arg("m0"), py::arg("sigma"), py::arg("k"), py::arg("T"), py::arg("seed") = 42,
        py::arg("burn_in") = 0, py::arg("gamma_k") = 0.5, py::arg("b") = 2.0,
        "Simulate a return series; returns a list of length T");

    m.def(
        "transition_probabilities",
        [](int k, double gamma_k, double b) { return msm::transition_probabilities(k, gamma_k, b); },
        py::arg("k"), py::arg("gamma_k") = 0.5, py::arg("b") = 2.0,
        "Per-component renewal probabilities, slowest first");

    m.def(
        "analytic_moments",
        [](double m0, double sigma, int k, const std::vector<int>& lags, double gamma_k, double b) {
            const msm::MomentVector v = msm::analytic_moments(m0, k, gamma_k, b, sigma, lags);
            py::dict d;
            d["lags"] = v.lags;
            d["values"] = v.values;
            return d;
        },
        py::arg("m0"), py::arg("sigma"), py::arg("k"), py::arg("lags") = std::vector<int>{1, 5, 10, 20},
        py::arg("gamma_k") = 0.5, py::arg("b") = 2.0,
        "Model-implied moment vector: autocovariances of log absolute returns per lag, "
        "their cross products, and the return variance");

    m.def(
        "empirical_moments",
        [](const std::vector<double>& returns, const std::vector<int>& lags) {
            const msm::MomentVector v = msm::empirical_moments(as_returns(returns), lags);
            py::dict d;
            d["lags"] = v.lags;
            d["values"] = v.values;
            d["dropped_zero_returns"] = v.dropped_zero_returns;
            return d;
        },
        py::arg("returns"), py::arg("lags") = std::vector<int>{1, 5, 10, 20},
        "Sample analogue of analytic_moments");

    m.def(
        "gmm_estimate",
        [](const std::vector<double>& returns, int k, const std::vector<int>& lags, bool iterated,
           int hac_lags) {
            msm::GmmConfig cfg;
            cfg.lags = lags;
            cfg.iterated = iterated;
            cfg.hac_lags = hac_lags;
            const msm::GmmResult r = msm::gmm_estimate(as_returns(returns), k, cfg);
            py::dict d;
            d["m0_hat"] = r.m0_hat;
            d["sigma_hat"] = r.sigma_hat;
            d["se_m0"] = r.se_m0;
            d["se_sigma"] = r.se_sigma;
            d["j_statistic"] = r.j_statistic;
            d["objective"] = r.objective;
            d["iterations"] = r.iterations;
            d["converged"] = r.converged;
            d["at_boundary"] = r.at_boundary;
            d["n_observations"] = r.n_observations;
            d["dropped_zero_returns"] = r.dropped_zero_returns;
            return d;
        },
        py::arg("returns"), py::arg("k"), py::arg("lags") = std::vector<int>{1, 5, 10, 20},
        py::arg("iterated") = false, py::arg("hac_lags") = -1,
        "Two-stage GMM fit of (m0, sigma) for a fixed number of components");

    m.def("structure_function", &msm::structure_function, py::arg("x"), py::arg("q"),
          py::arg("tau"), py::arg("v") = 1,
          "q-th order structure function of a signal at horizon tau");

    m.def("ghe", &msm::ghe, py::arg("x"), py::arg("q"), py::arg("tau_max"),
          "Generalized Hurst exponent of a signal from horizons 1..tau_max");

    m.def(
        "ghe_averaged",
        [](const std::vector<double>& returns, double q, const std::vector<int>& tau_max_set,
           const std::string& mode) {
            return ghe_dict(msm::ghe_averaged(as_returns(returns), q, tau_max_set, parse_mode(mode)));
        },
        py::arg("returns"), py::arg("q"), py::arg("tau_max_set") = msm::default_tau_max_set(),
        py::arg("mode") = "integrated",
        "Hurst exponent averaged over a grid of regression horizons");

    m.def(
        "lo_statistic",
        [](const std::vector<double>& x, int tau, const std::string& denominator) {
            return lo_dict(msm::lo_statistic(x, tau, parse_denominator(denominator)));
        },
        py::arg("x"), py::arg("tau"), py::arg("denominator") = "newey_west",
        "Modified rescaled-range statistic with truncation lag tau");

    m.def("rs_significance", &msm::rs_significance, py::arg("v_stat"), py::arg("level"),
          "True when the normalized R/S statistic falls outside the confidence band");

    m.def(
        "load_csv",
        [](const std::string& path, char delimiter, bool has_header, int value_column,
           const std::string& value_name, int date_column, const std::string& date_name) {
            msm::CsvSpec spec;
            spec.delimiter = delimiter;
            spec.has_header = has_header;
            spec.value_column = value_column;
            spec.value_name = value_name;
            spec.date_column = date_column;
            spec.date_name = date_name;
            const msm::LoadResult lr = msm::load_csv(path, spec);
            py::dict d;
            d["values"] = lr.series.values;
            d["dates"] = lr.series.dates;
            d["label"] = lr.series.label;
            d["skipped_rows"] = lr.skipped_rows;
            return d;
        },
        py::arg("path"), py::arg("delimiter") = ',', py::arg("has_header") = true,
        py::arg("value_column") = -1, py::arg("value_name") = "", py::arg("date_column") = -1,
        py::arg("date_name") = "", "Load a price or return column from a CSV file");

    m.def(
        "to_returns",
        [](const std::vector<double>& prices, const std::string& transform) {
            msm::PriceSeries p;
            p.values = prices;
            const auto t = transform == "log"    ? msm::Transform::log_diff
                           : transform == "diff" ? msm::Transform::diff
                                                 : throw msm::ValidationError(
                                                       "transform must be 'log' or 'diff'");
            return msm::to_returns(p, t).values;
        },
        py::arg("prices"), py::arg("transform") = "log",
        "Difference a price series into returns");

    m.def(
        "standardize",
        [](const std::vector<double>& returns) { return msm::standardize(as_returns(returns)).values; },
        py::arg("returns"), "Scale to unit population standard deviation");

    m.def("nearest_rank_quantile", &msm::nearest_rank_quantile, py::arg("values"), py::arg("p"),
          "Order statistic at the nearest rank");

    m.def(
        "mc_ensemble",
        [](const std::vector<std::tuple<int, double, double>>& k_params, std::size_t T,
           int ghe_reps, int lo_reps, const std::vector<int>& tau_set,
           const std::vector<double>& q_set, const std::vector<int>& tau_max_set,
           const std::string& mode, const std::string& denominator, std::uint64_t seed,
           int threads) {
            std::vector<std::pair<int, msm::MsmParams>> params;
            std::vector<int> k_set;
            for (const auto& [k, m0, sigma] : k_params) {
                params.emplace_back(k, make_params(m0, sigma, k, 0.5, 2.0));
                k_set.push_back(k);
            }
            msm::McConfig cfg;
            cfg.ghe_reps = ghe_reps;
            cfg.lo_reps = lo_reps;
            cfg.T = T;
            cfg.k_set = k_set;
            cfg.tau_set = tau_set;
            cfg.q_set = q_set;
            cfg.tau_max_set = tau_max_set;
            cfg.ghe_mode = parse_mode(mode);
            cfg.lo_denominator = parse_denominator(denominator);
            cfg.master_seed = seed;
            cfg.threads = threads;
            const msm::EnsembleSet set = msm::run_ensemble(params, cfg);
            py::list ghe_out, lo_out;
            for (const auto& e : set.ghe) {
                py::dict d;
                d["k"] = e.k;
                d["q"] = e.q;
                d["h"] = e.h;
                ghe_out.append(std::move(d));
            }
            for (const auto& e : set.lo) {
                py::dict d;
                d["k"] = e.k;
                d["tau"] = e.tau;
                d["v"] = e.v;
                d["h"] = e.h;
                lo_out.append(std::move(d));
            }
            py::dict out;
            out["ghe"] = std::move(ghe_out);
            out["lo"] = std::move(lo_out);
            out["excluded"] = set.excluded;
            return out;
        },
        py::arg("k_params"), py::arg("T") = 9372, py::arg("ghe_reps") = 100,
        py::arg("lo_reps") = 1000, py::arg("tau_set") = std::vector<int>{0, 5, 10, 25, 50, 100},
        py::arg("q_set") = std::vector<double>{1.0, 2.0},
        py::arg("tau_max_set") = msm::default_tau_max_set(), py::arg("mode") = "integrated",
        py::arg("denominator") = "newey_west_zero_lag", py::arg("seed") = 42,
        py::arg("threads") = 0,
        "Simulate per-k ensembles (k_params: list of (k, m0, sigma)) and return the "
        "Hurst and R/S distributions");
}
