#include "ewarn/leadlag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ewarn/errors.hpp"

namespace ewarn {

double quantile_type7(std::vector<double> data, double q) {
    if (data.empty()) throw DataError("quantile of empty data");
    std::sort(data.begin(), data.end());
    const double h = (static_cast<double>(data.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, data.size() - 1);
    return data[lo] + (h - static_cast<double>(lo)) * (data[hi] - data[lo]);
}

LeadLagSummary summarize_leads(const std::map<StateProxy, TrendEvent>& events, const std::string& input_proxy,
                               const std::string& reference_proxy, int max_abs_days) {
    LeadLagSummary s;
    s.input_proxy = input_proxy;
    s.reference_proxy = reference_proxy;
    std::vector<double> values;
    for (const auto& [key, ev] : events) {
        if (key.second != input_proxy) continue;
        const auto ref = events.find({key.first, reference_proxy});
        if (ref == events.end()) continue;
        const long diff = ev.event_date - ref->second.event_date;
        if (std::labs(diff) > max_abs_days) continue;
        s.diffs.emplace_back(key.first, static_cast<int>(diff));
        values.push_back(static_cast<double>(diff));
    }
    if (values.empty()) {
        throw DataError("no state has events for both '" + input_proxy + "' and '" + reference_proxy +
                        "' within " + std::to_string(max_abs_days) + " days");
    }
    s.median = quantile_type7(values, 0.5);
    s.q1 = quantile_type7(values, 0.25);
    s.q3 = quantile_type7(values, 0.75);
    return s;
}

std::map<std::string, double> first_activation_tally(const std::map<StateProxy, TrendEvent>& events) {
    std::map<std::string, std::vector<std::pair<Date, std::string>>> by_state;
    for (const auto& [key, ev] : events) by_state[key.first].emplace_back(ev.event_date, key.second);
    std::map<std::string, double> tally;
    for (const auto& [state, list] : by_state) {
        const Date first = std::min_element(list.begin(), list.end())->first;
        const auto ties = std::count_if(list.begin(), list.end(), [&](const auto& e) { return e.first == first; });
        for (const auto& [date, proxy] : list) {
            if (date == first) tally[proxy] += 1.0 / static_cast<double>(ties);
        }
    }
    return tally;
}

}  // namespace ewarn
