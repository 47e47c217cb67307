// Python bindings over the detection, combination, posterior and ILI routines.
// Dates cross the boundary as ISO strings.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ewarn/combine.hpp"
#include "ewarn/detect.hpp"
#include "ewarn/errors.hpp"
#include "ewarn/excess_ili.hpp"
#include "ewarn/synth.hpp"
#include "ewarn/time_to_event.hpp"

namespace py = pybind11;
using namespace ewarn;

namespace {

DetectorConfig make_config(std::uint64_t seed, int n_draws, int burn_in, int thin, double threshold) {
    DetectorConfig cfg;
    cfg.seed = seed;
    cfg.n_draws = n_draws;
    cfg.burn_in = burn_in;
    cfg.thin = thin;
    cfg.threshold = threshold;
    cfg.validate();
    return cfg;
}

std::vector<std::string> iso_dates(const std::vector<Date>& d) {
    std::vector<std::string> out;
    out.reserve(d.size());
    for (const auto& x : d) out.push_back(x.iso());
    return out;
}

py::dict pvalue_dict(const PValueSeries& pv) {
    py::dict out;
    out["dates"] = iso_dates(pv.dates);
    out["p"] = pv.p;
    return out;
}

ili::WeeklySeries weekly(const std::vector<std::string>& weeks, const std::vector<double>& values) {
    if (weeks.size() != values.size()) throw DataError("weeks and values differ in length");
    ili::WeeklySeries s;
    for (const auto& w : weeks) s.weeks.push_back(Date::parse(w));
    s.values = values;
    return s;
}

}  // namespace

PYBIND11_MODULE(_ewarn, m) {
    m.doc() = "Early-warning trend detection core";

    auto base = py::register_exception<Error>(m, "EwarnError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    m.def(
        "trend_pvalues",
        [](const std::vector<double>& values, const std::string& start, const std::string& location,
           const std::string& proxy_id, std::uint64_t seed, int n_draws, int burn_in, int thin, unsigned threads) {
            DailySeries s;
            s.location = location;
            s.proxy_id = proxy_id;
            s.start_date = Date::parse(start);
            s.values = values;
            const auto cfg = make_config(seed, n_draws, burn_in, thin, 0.05);
            TrendPValues pv;
            {
                py::gil_scoped_release release;
                pv = trend_pvalues(s, cfg, threads);
            }
            py::dict out;
            out["uptrend"] = pvalue_dict(pv.up);
            out["downtrend"] = pvalue_dict(pv.down);
            return out;
        },
        py::arg("values"), py::arg("start"), py::arg("location") = "loc", py::arg("proxy_id") = "proxy",
        py::arg("seed") = 0, py::arg("n_draws") = 5000, py::arg("burn_in") = 500, py::arg("thin") = 5,
        py::arg("threads") = 1,
        "Per-window uptrend and downtrend p-values for a daily series.");

    m.def(
        "detect_events",
        [](const std::vector<std::string>& dates, const std::vector<double>& p, double threshold, int refractory) {
            if (dates.size() != p.size()) throw DataError("dates and p differ in length");
            PValueSeries pv;
            for (const auto& d : dates) pv.dates.push_back(Date::parse(d));
            pv.p = p;
            std::vector<std::pair<std::string, double>> out;
            for (const auto& e : detect_events(pv, threshold, refractory)) out.emplace_back(e.event_date.iso(), e.p_at_event);
            return out;
        },
        py::arg("dates"), py::arg("p"), py::arg("threshold") = 0.05, py::arg("refractory_days") = 14,
        "Threshold down-crossings as (date, p) pairs.");

    m.def(
        "uptrend_pvalue",
        [](const std::vector<double>& window, std::uint64_t seed, int n_draws) {
            auto cfg = make_config(seed, n_draws, 500, 5, 0.05);
            return uptrend_pvalue(sample_posterior(window, cfg, seed));
        },
        py::arg("window"), py::arg("seed") = 0, py::arg("n_draws") = 5000,
        "Sampler p-value for one window, used as given.");

    m.def(
        "grid_oracle",
        [](const std::vector<double>& window) { return synth::grid_posterior_oracle(window, DetectorConfig{}); },
        py::arg("window"), "Deterministic quadrature value of P(gamma <= 0 | window).");

    m.def(
        "harmonic_mean_p",
        [](const std::vector<double>& p, std::optional<std::vector<double>> w, double floor) {
            std::vector<WeightedP> e;
            for (std::size_t i = 0; i < p.size(); ++i) {
                e.push_back({"p" + std::to_string(i), p[i], w ? w->at(i) : 1.0});
            }
            return harmonic_mean_p(e, floor);
        },
        py::arg("p"), py::arg("weights") = py::none(), py::arg("p_floor") = 1e-6,
        "Weighted harmonic mean p-value.");

    m.def(
        "time_to_event",
        [](const std::map<std::string, std::vector<double>>& lags, const std::map<std::string, std::optional<double>>& since,
           const std::string& as_of, double bandwidth_floor) {
            std::map<std::string, LagModel> models;
            std::map<std::string, ExpertInput> experts;
            for (const auto& [id, l] : lags) models.emplace(id, LagModel{id, l, l.size() < 2 ? bandwidth_floor : scott_bandwidth(l, bandwidth_floor)});
            for (const auto& [id, d] : since) experts[id] = ExpertInput{d, SeriesKind::proxy};
            const auto post = posterior_time_to_event(experts, models, Date::parse(as_of));
            py::dict out;
            out["support"] = post.support;
            out["pmf"] = post.pmf;
            return out;
        },
        py::arg("lags"), py::arg("days_since_event"), py::arg("as_of"), py::arg("bandwidth_floor") = 0.5,
        "Posterior pmf over 0..179 days until the gold-standard event.");

    m.def(
        "fit_idea",
        [](const std::vector<std::string>& weeks, const std::vector<double>& counts, const std::string& season_start,
           const std::string& fit_end) {
            const auto fit = ili::fit_idea(weekly(weeks, counts), Date::parse(season_start), Date::parse(fit_end));
            py::dict out;
            out["r0"] = fit.r0;
            out["d"] = fit.d;
            out["scale"] = fit.scale;
            out["sse"] = fit.sse;
            return out;
        },
        py::arg("weeks"), py::arg("counts"), py::arg("season_start"), py::arg("fit_end"),
        "Least-squares IDEA fit on weekly counts.");

    m.def(
        "idea_incidence",
        [](double r0, double d, double scale, double t) {
            ili::IdeaFit f;
            f.r0 = r0;
            f.d = d;
            f.scale = scale;
            return ili::idea_incidence(f, t);
        },
        py::arg("r0"), py::arg("d"), py::arg("scale"), py::arg("t"));
}
