#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ewarn/detect.hpp"

namespace ewarn {

struct WeightedP {
    std::string proxy_id;
    double p;
    double w;
};

struct CombineConfig {
    double p_floor = 1e-6;                  // p-values below this are raised to it
    std::map<std::string, double> weights;  // by proxy_id; missing entries weigh 1
};

/// Weighted harmonic mean p-value: Σw / Σ(w/p). Weights are normalized
/// internally; p-values are floored at `p_floor` first.
double harmonic_mean_p(std::span<const WeightedP> entries, double p_floor = 1e-6);

/// Per-date HMP across proxies. Dates where fewer than two proxies have a
/// value are dropped; on the remaining dates weights are renormalized over the
/// proxies present. The result carries proxy_id "combined".
PValueSeries combined_pvalue_series(std::span<const PValueSeries> series, const CombineConfig& cfg = {});

/// Same crossing and refractory semantics as detect_events.
std::vector<TrendEvent> detect_combined_events(const PValueSeries& combined, double threshold,
                                               int refractory_days = 14);

}  // namespace ewarn
