#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ewarn/date.hpp"

namespace ewarn {

enum class SeriesKind { proxy, gold, mobility };

std::string_view to_string(SeriesKind k);
SeriesKind parse_series_kind(std::string_view s);

struct SeriesRef {
    std::string location;
    std::string proxy_id;

    auto operator<=>(const SeriesRef&) const = default;
};

/// Location-tagged, uniformly daily-spaced observations. values[i] belongs to
/// start_date + i days. Gaps are resolved at load time, so values are finite.
struct DailySeries {
    std::string location;
    std::string proxy_id;
    Date start_date;
    std::vector<double> values;
    int delay_days = 0;
    SeriesKind kind = SeriesKind::proxy;

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    Date date_at(std::size_t i) const { return start_date + static_cast<long>(i); }
    /// Last covered date. Undefined for an empty series.
    Date end_date() const { return start_date + static_cast<long>(values.size()) - 1; }
    SeriesRef ref() const { return {location, proxy_id}; }
};

/// W consecutive observations of one series ending at end_date.
struct Window {
    SeriesRef series_ref;
    Date end_date;
    std::vector<double> values;
};

/// Moves start_date earlier by delay_days so each value sits on the date it
/// describes rather than the date it became available.
DailySeries shift_for_delay(DailySeries s);

/// Affine map onto [0, 1]. Throws DataError for a constant series.
DailySeries minmax_normalize(DailySeries s);

/// Trailing k-day mean with an expanding start.
DailySeries moving_average(DailySeries s, std::size_t k);

/// Σ w_j s_j / Σ w_j, pointwise. All inputs must cover identical dates.
DailySeries aggregate_weighted(std::span<const DailySeries> series, std::span<const double> weights);

/// max(observed - expected, 0), pointwise.
DailySeries truncate_excess(const DailySeries& observed, const DailySeries& expected);

std::vector<double> rebase_min_one(std::span<const double> values);
Window rebase_min_one(Window w);

/// Window of `width` values ending at index `end_index` (inclusive).
Window window_at(const DailySeries& s, std::size_t end_index, std::size_t width);

/// Keeps only dates <= last. Returns an empty series if start_date > last.
DailySeries truncate_after(DailySeries s, Date last);

/// Raw (date, value) observation; NaN marks a missing value.
struct Observation {
    Date date;
    double value;
};

/// Builds a contiguous daily series from sparse observations. Interior gaps
/// (missing dates or NaN values) are filled by linear interpolation; leading
/// and trailing gaps are dropped. Throws DataError on duplicate dates or when
/// no finite value exists.
DailySeries densify_daily(std::vector<Observation> obs);

/// Expands weekly observations (week start dates) to a daily grid by
/// assigning each weekly value to the seven days of its week.
DailySeries expand_weekly(std::vector<Observation> weekly);

/// Reads a `date,value` CSV. Empty or "NA"/"nan" cells become NaN.
std::vector<Observation> read_observation_csv(const std::filesystem::path& path);

void write_series_csv(const std::filesystem::path& path, const DailySeries& s);

}  // namespace ewarn
