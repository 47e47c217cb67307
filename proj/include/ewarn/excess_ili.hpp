#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "ewarn/date.hpp"

namespace ewarn::ili {

/// Weekly values keyed by week start date; weeks strictly increasing.
struct WeeklySeries {
    std::vector<Date> weeks;
    std::vector<double> values;

    std::size_t size() const { return weeks.size(); }
};

/// Incidence Decay and Exponential Adjustment curve over serial-interval steps:
/// I(t) = scale * (r0 / (1 + d)^t)^t.
struct IdeaFit {
    double r0 = 1.0;
    double d = 0.0;
    double scale = 1.0;  // incidence at step 0
    Date season_start;
    double serial_interval_days = 3.5;
    double sse = 0.0;    // residual sum of squares of the fit

    void validate() const;
    /// Serial-interval steps elapsed between season_start and `week`.
    double steps_at(Date week) const;
};

struct VirologyRecord {
    Date week;
    double flu_positive = 0;
    double total_specimens = 0;
    double ili_visits = 0;
};

/// First week w with activity(w) > threshold and activity(w + 1) > threshold.
/// Throws DataError when no such pair exists.
Date flu_season_start(const WeeklySeries& ili_activity_pct, double threshold_pct = 2.0);

/// (r0 / (1 + d)^t)^t times the fit's scale. t is in serial-interval steps.
double idea_incidence(const IdeaFit& fit, double t);

/// Least-squares fit of (r0, d) on weeks in [season_start, fit_end]; the scale
/// is profiled out in closed form. Coarse grid then bounded Nelder-Mead.
/// r0 in (1, 10], d in [0, 1].
IdeaFit fit_idea(const WeeklySeries& ili_counts, Date season_start, Date fit_end,
                 double serial_interval_days = 3.5);

/// IDEA prediction on the given weeks.
WeeklySeries idea_counterfactual(const IdeaFit& fit, std::span<const Date> weeks);

/// F_t = F+_t * I_t / N_t. Weeks without specimens are omitted.
WeeklySeries virology_counterfactual(std::span<const VirologyRecord> records);

/// OLS map from flu counts to ILI activity, fit on weeks <= precovid_end.
struct LinearMap {
    double slope;
    double intercept;
    std::size_t training_weeks;
};
LinearMap fit_flu_to_ili(const WeeklySeries& flu_counts, const WeeklySeries& ili_activity, Date precovid_end);
WeeklySeries map_flu_to_ili(const WeeklySeries& flu_counts, const WeeklySeries& ili_activity,
                            Date precovid_end);

/// observed - counterfactual per week. Negative values are kept.
WeeklySeries excess_ili(const WeeklySeries& observed, const WeeklySeries& counterfactual);

/// Restricts both series to their common weeks, in order.
std::pair<WeeklySeries, WeeklySeries> align(const WeeklySeries& a, const WeeklySeries& b);

/// `week_start,activity_pct,ili_visits` CSV.
struct IliTable {
    WeeklySeries activity_pct;
    WeeklySeries ili_visits;
};
IliTable read_ili_csv(const std::filesystem::path& path);

/// `week_start,flu_positive,total_specimens` CSV; ILI visits are joined from `ili`.
std::vector<VirologyRecord> read_virology_csv(const std::filesystem::path& path, const IliTable& ili);

}  // namespace ewarn::ili
