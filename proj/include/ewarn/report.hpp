#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ewarn/detect.hpp"
#include "ewarn/excess_ili.hpp"
#include "ewarn/leadlag.hpp"
#include "ewarn/time_to_event.hpp"
#include "ewarn/ts_core.hpp"

namespace ewarn::report {

/// `date,p` CSV.
std::string pvalues_csv(const PValueSeries& pv);
PValueSeries read_pvalues_csv(const std::filesystem::path& path, SeriesRef ref, Direction direction);

/// Event records: location, proxy_id, direction, event_date, p_at_event.
std::string events_json(std::span<const TrendEvent> events);

/// {as_of, direction, location, support, pmf}.
std::string posterior_json(const TimeToEventPosterior& post, const std::string& location);
/// `days_ahead,date,p`.
std::string posterior_csv(const TimeToEventPosterior& post);

/// `input,reference,state,diff_days`.
std::string leadlag_csv(std::span<const LeadLagSummary> summaries);
std::string leadlag_json(std::span<const LeadLagSummary> summaries);
std::string tally_json(const std::map<std::string, double>& tally, Direction direction);

/// Creates parent directories as needed.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ewarn::report

namespace ewarn::svg {

/// Rows of normalized, smoothed series with p-value bands and event markers.
struct DetectionPanel {
    DailySeries series;                 // raw (delay-adjusted) values
    const PValueSeries* up = nullptr;
    const PValueSeries* down = nullptr;
    std::vector<TrendEvent> events;
};
std::string detection_plot(const std::string& location, std::span<const DetectionPanel> panels,
                           int smoothing_days, double threshold);

/// Posterior pmf laid over the gold series, with proxy events as vertical rules.
std::string posterior_plot(const std::string& location, const TimeToEventPosterior& post,
                           const DailySeries* gold, std::span<const TrendEvent> events);

}  // namespace ewarn::svg
