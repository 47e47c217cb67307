#include "ewarn/ts_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ewarn/csv.hpp"
#include "ewarn/errors.hpp"

namespace ewarn {

std::string_view to_string(SeriesKind k) {
    switch (k) {
        case SeriesKind::proxy: return "proxy";
        case SeriesKind::gold: return "gold";
        case SeriesKind::mobility: return "mobility";
    }
    return "proxy";
}

SeriesKind parse_series_kind(std::string_view s) {
    if (s == "proxy") return SeriesKind::proxy;
    if (s == "gold") return SeriesKind::gold;
    if (s == "mobility") return SeriesKind::mobility;
    throw ConfigError("unknown series kind '" + std::string(s) + "'");
}

DailySeries shift_for_delay(DailySeries s) {
    if (s.delay_days < 0) throw ConfigError("negative delay_days for " + s.proxy_id);
    s.start_date = s.start_date - s.delay_days;
    s.delay_days = 0;
    return s;
}

DailySeries minmax_normalize(DailySeries s) {
    if (s.empty()) throw DataError("cannot normalize an empty series");
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    const double min = *lo;
    const double range = *hi - *lo;
    if (!(range > 0.0)) throw DataError("cannot normalize " + s.proxy_id + ": zero range");
    for (auto& v : s.values) v = (v - min) / range;
    return s;
}

DailySeries moving_average(DailySeries s, std::size_t k) {
    if (k == 0) throw ConfigError("moving average length must be >= 1");
    if (k > s.size()) {
        throw DataError("moving average length " + std::to_string(k) + " exceeds series length " +
                        std::to_string(s.size()));
    }
    if (k == 1) return s;
    std::vector<double> out(s.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        sum += s.values[i];
        if (i >= k) sum -= s.values[i - k];
        const std::size_t n = std::min(i + 1, k);
        out[i] = sum / static_cast<double>(n);
    }
    s.values = std::move(out);
    return s;
}

DailySeries aggregate_weighted(std::span<const DailySeries> series, std::span<const double> weights) {
    if (series.empty()) throw DataError("nothing to aggregate");
    if (series.size() != weights.size()) {
        throw ConfigError("aggregation weights do not align with series");
    }
    const auto& first = series.front();
    double total = 0.0;
    for (std::size_t j = 0; j < series.size(); ++j) {
        const auto& s = series[j];
        if (s.start_date != first.start_date || s.size() != first.size()) {
            throw DataError("cannot aggregate " + s.location + "/" + s.proxy_id +
                            ": date range differs from " + first.location + "/" + first.proxy_id);
        }
        if (s.proxy_id != first.proxy_id) {
            throw DataError("cannot aggregate different proxies '" + s.proxy_id + "' and '" +
                            first.proxy_id + "'");
        }
        if (!(weights[j] >= 0.0)) throw ConfigError("aggregation weights must be non-negative");
        total += weights[j];
    }
    if (!(total > 0.0)) throw ConfigError("aggregation weights must have positive total");

    DailySeries out = first;
    std::fill(out.values.begin(), out.values.end(), 0.0);
    for (std::size_t j = 0; j < series.size(); ++j) {
        const double w = weights[j] / total;
        for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += w * series[j].values[i];
    }
    return out;
}

DailySeries truncate_excess(const DailySeries& observed, const DailySeries& expected) {
    if (observed.start_date != expected.start_date || observed.size() != expected.size()) {
        throw DataError("observed and expected series for " + observed.proxy_id + " are misaligned");
    }
    DailySeries out = observed;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.values[i] = std::max(observed.values[i] - expected.values[i], 0.0);
    }
    return out;
}

std::vector<double> rebase_min_one(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    if (out.empty()) return out;
    const double min = *std::min_element(out.begin(), out.end());
    for (auto& v : out) v = v - min + 1.0;
    return out;
}

Window rebase_min_one(Window w) {
    w.values = rebase_min_one(w.values);
    return w;
}

Window window_at(const DailySeries& s, std::size_t end_index, std::size_t width) {
    if (width == 0 || end_index >= s.size() || end_index + 1 < width) {
        throw DataError("window of width " + std::to_string(width) + " ending at index " +
                        std::to_string(end_index) + " does not fit series " + s.proxy_id);
    }
    Window w;
    w.series_ref = s.ref();
    w.end_date = s.date_at(end_index);
    const auto first = s.values.begin() + static_cast<std::ptrdiff_t>(end_index + 1 - width);
    w.values.assign(first, first + static_cast<std::ptrdiff_t>(width));
    return w;
}

DailySeries truncate_after(DailySeries s, Date last) {
    if (s.empty()) return s;
    if (last < s.start_date) {
        s.values.clear();
        return s;
    }
    const auto keep = static_cast<std::size_t>(last - s.start_date) + 1;
    if (keep < s.size()) s.values.resize(keep);
    return s;
}

DailySeries densify_daily(std::vector<Observation> obs) {
    std::sort(obs.begin(), obs.end(),
              [](const Observation& a, const Observation& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < obs.size(); ++i) {
        if (obs[i].date == obs[i - 1].date) {
            throw DataError("duplicate date " + obs[i].date.iso());
        }
    }
    std::erase_if(obs, [](const Observation& o) { return !std::isfinite(o.value); });
    if (obs.empty()) throw DataError("series has no finite observations");

    DailySeries s;
    s.start_date = obs.front().date;
    s.values.reserve(static_cast<std::size_t>(obs.back().date - obs.front().date) + 1);
    s.values.push_back(obs.front().value);
    for (std::size_t i = 1; i < obs.size(); ++i) {
        const long gap = obs[i].date - obs[i - 1].date;
        const double a = obs[i - 1].value;
        const double b = obs[i].value;
        for (long k = 1; k < gap; ++k) {
            s.values.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(gap));
        }
        s.values.push_back(b);
    }
    return s;
}

DailySeries expand_weekly(std::vector<Observation> weekly) {
    std::sort(weekly.begin(), weekly.end(),
              [](const Observation& a, const Observation& b) { return a.date < b.date; });
    std::vector<Observation> daily;
    daily.reserve(weekly.size() * 7);
    for (std::size_t i = 0; i < weekly.size(); ++i) {
        if (i > 0 && weekly[i].date - weekly[i - 1].date < 7) {
            throw DataError("weekly observations closer than 7 days at " + weekly[i].date.iso());
        }
        for (long d = 0; d < 7; ++d) daily.push_back({weekly[i].date + d, weekly[i].value});
    }
    // Weeks missing from the record stay as gaps and are interpolated.
    return densify_daily(std::move(daily));
}

std::vector<Observation> read_observation_csv(const std::filesystem::path& path) {
    const auto table = csv::read_table(path, {"date", "value"});
    std::vector<Observation> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        try {
            out.push_back({Date::parse(table.rows[r][0]), csv::parse_number(table.rows[r][1])});
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(table.line_numbers[r]) + ": " +
                            e.what());
        }
    }
    return out;
}

void write_series_csv(const std::filesystem::path& path, const DailySeries& s) {
    auto out = csv::open_output(path);
    out << "date,value\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << s.date_at(i).iso() << ',' << csv::format_double(s.values[i]) << '\n';
    }
}

}  // namespace ewarn
