#include "ewarn/combine.hpp"

#include <algorithm>
#include <cmath>

#include "ewarn/errors.hpp"

namespace ewarn {

double harmonic_mean_p(std::span<const WeightedP> entries, double p_floor) {
    if (entries.empty()) throw DataError("harmonic mean of an empty p-value set");
    double total_w = 0.0;
    for (const auto& e : entries) {
        if (!(e.w > 0.0) || !std::isfinite(e.w)) {
            throw ConfigError("weight for '" + e.proxy_id + "' must be positive");
        }
        if (!(e.p >= 0.0 && e.p <= 1.0)) {
            throw DataError("p-value for '" + e.proxy_id + "' outside [0, 1]");
        }
        total_w += e.w;
    }
    double denom = 0.0;
    for (const auto& e : entries) {
        const double p = std::max(e.p, p_floor);
        if (!(p > 0.0)) throw DataError("p-value for '" + e.proxy_id + "' is zero after flooring");
        denom += (e.w / total_w) / p;
    }
    return 1.0 / denom;
}

PValueSeries combined_pvalue_series(std::span<const PValueSeries> series, const CombineConfig& cfg) {
    if (series.size() < 2) throw DataError("combining needs at least two p-value series");
    const auto& head = series.front();
    for (const auto& s : series) {
        if (s.series_ref.location != head.series_ref.location) {
            throw DataError("cannot combine p-values across locations " + head.series_ref.location +
                            " and " + s.series_ref.location);
        }
        if (s.direction != head.direction) throw DataError("cannot combine uptrend with downtrend p-values");
        if (s.dates.size() != s.p.size()) throw DataError("malformed p-value series " + s.series_ref.proxy_id);
    }

    std::map<Date, std::vector<WeightedP>> by_date;
    for (const auto& s : series) {
        const auto it = cfg.weights.find(s.series_ref.proxy_id);
        const double w = it == cfg.weights.end() ? 1.0 : it->second;
        for (std::size_t i = 0; i < s.dates.size(); ++i) {
            by_date[s.dates[i]].push_back({s.series_ref.proxy_id, s.p[i], w});
        }
    }

    PValueSeries out;
    out.series_ref = {head.series_ref.location, "combined"};
    out.direction = head.direction;
    for (const auto& [date, entries] : by_date) {
        if (entries.size() < 2) continue;
        out.dates.push_back(date);
        out.p.push_back(harmonic_mean_p(entries, cfg.p_floor));
    }
    if (out.dates.empty()) {
        throw DataError("no date in " + head.series_ref.location + " has two or more proxies to combine");
    }
    return out;
}

std::vector<TrendEvent> detect_combined_events(const PValueSeries& combined, double threshold,
                                               int refractory_days) {
    return detect_events(combined, threshold, refractory_days);
}

}  // namespace ewarn
