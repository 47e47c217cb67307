#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ewarn/detect.hpp"

namespace ewarn {

using StateProxy = std::pair<std::string, std::string>;  // (state, proxy_id)

struct LeadLagSummary {
    std::string input_proxy;
    std::string reference_proxy;
    std::vector<std::pair<std::string, int>> diffs;  // per state: input - reference, days
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

/// Linear-interpolation quantile (R type 7) of unsorted data.
double quantile_type7(std::vector<double> data, double q);

/// Per-state event-date differences (input - reference). States missing either
/// event are skipped, and differences beyond `max_abs_days` are dropped.
/// Negative values mean the input fired first.
LeadLagSummary summarize_leads(const std::map<StateProxy, TrendEvent>& events, const std::string& input_proxy,
                               const std::string& reference_proxy, int max_abs_days = 50);

/// Per state, one vote for the proxy with the earliest event; ties split the vote.
std::map<std::string, double> first_activation_tally(const std::map<StateProxy, TrendEvent>& events);

}  // namespace ewarn
