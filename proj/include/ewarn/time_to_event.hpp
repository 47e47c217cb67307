#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ewarn/date.hpp"
#include "ewarn/detect.hpp"
#include "ewarn/ts_core.hpp"

namespace ewarn {

/// Smoothed empirical distribution of (outbreak date - proxy event date) in days.
struct LagModel {
    std::string proxy_id;
    std::vector<double> lag_samples;
    double bandwidth = 1.0;
};

struct TimeToEventPosterior {
    Date as_of;
    Direction direction = Direction::uptrend;
    std::vector<int> support;  // 0 .. horizon-1 days ahead
    std::vector<double> pmf;

    int mode() const;
    double mean() const;
    double variance() const;
    /// Probability mass on days [lo, hi] ahead (clipped to the support).
    double mass_between(int lo, int hi) const;
};

struct TimeToEventConfig {
    int horizon_days = 180;
    double smoothing = 1e-6;        // added to every expert likelihood
    double bandwidth_floor = 0.5;   // days
    std::string gold_proxy = "cases";
};

/// Events observed in one state: first-wave event date per proxy plus the
/// gold-standard event, if any.
struct StateEvents {
    std::map<std::string, Date> proxy_events;
    std::optional<Date> gold_event;
};

/// Scott's rule for univariate data: sd * n^(-1/5), never below `floor`.
double scott_bandwidth(std::span<const double> samples, double floor = 0.5);

/// Collects gold - proxy lags over states that have both events. States listed
/// in `exclude` (e.g. the state being predicted) are skipped. With a single
/// sample the bandwidth falls back to the floor.
LagModel pool_lags(const std::map<std::string, StateEvents>& events_by_state, const std::string& proxy_id,
                   double bandwidth_floor = 0.5, const std::vector<std::string>& exclude = {});

/// Gaussian kernel density estimate at x.
double kde_pdf(const LagModel& model, double x);

/// One expert per proxy. days_since_event is empty when the proxy has not
/// fired as of the evaluation date.
struct ExpertInput {
    std::optional<double> days_since_event;
    SeriesKind kind = SeriesKind::proxy;
};

/// Posterior over days until the gold event, as a product of conditionally
/// independent per-proxy KDE experts under a uniform prior. For uptrends
/// mobility experts are ignored.
TimeToEventPosterior posterior_time_to_event(const std::map<std::string, ExpertInput>& experts,
                                             const std::map<std::string, LagModel>& models, Date as_of,
                                             Direction direction = Direction::uptrend,
                                             const TimeToEventConfig& cfg = {});

}  // namespace ewarn
