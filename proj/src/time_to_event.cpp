#include "ewarn/time_to_event.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ewarn/errors.hpp"

namespace ewarn {

int TimeToEventPosterior::mode() const {
    return support.at(static_cast<std::size_t>(std::max_element(pmf.begin(), pmf.end()) - pmf.begin()));
}

double TimeToEventPosterior::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) m += support[i] * pmf[i];
    return m;
}

double TimeToEventPosterior::variance() const {
    const double mu = mean();
    double v = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) v += (support[i] - mu) * (support[i] - mu) * pmf[i];
    return v;
}

double TimeToEventPosterior::mass_between(int lo, int hi) const {
    double m = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        if (support[i] >= lo && support[i] <= hi) m += pmf[i];
    }
    return m;
}

double scott_bandwidth(std::span<const double> samples, double floor) {
    if (samples.size() < 2) throw DataError("Scott's rule needs at least two samples");
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return std::max(sd * std::pow(n, -0.2), floor);
}

LagModel pool_lags(const std::map<std::string, StateEvents>& events_by_state, const std::string& proxy_id,
                   double bandwidth_floor, const std::vector<std::string>& exclude) {
    LagModel model;
    model.proxy_id = proxy_id;
    for (const auto& [state, ev] : events_by_state) {
        if (std::find(exclude.begin(), exclude.end(), state) != exclude.end()) continue;
        const auto it = ev.proxy_events.find(proxy_id);
        if (it == ev.proxy_events.end() || !ev.gold_event) continue;
        model.lag_samples.push_back(static_cast<double>(*ev.gold_event - it->second));
    }
    if (model.lag_samples.empty()) {
        throw DataError("no state has both a '" + proxy_id + "' event and a gold event");
    }
    model.bandwidth = model.lag_samples.size() >= 2 ? scott_bandwidth(model.lag_samples, bandwidth_floor)
                                                    : bandwidth_floor;
    return model;
}

double kde_pdf(const LagModel& model, double x) {
    if (model.lag_samples.empty() || !(model.bandwidth > 0.0)) {
        throw ConfigError("KDE for '" + model.proxy_id + "' is not fitted");
    }
    const double h = model.bandwidth;
    double sum = 0.0;
    for (double l : model.lag_samples) {
        const double z = (x - l) / h;
        sum += std::exp(-0.5 * z * z);
    }
    return sum * std::numbers::inv_sqrtpi / std::numbers::sqrt2 /
           (static_cast<double>(model.lag_samples.size()) * h);
}

TimeToEventPosterior posterior_time_to_event(const std::map<std::string, ExpertInput>& experts,
                                             const std::map<std::string, LagModel>& models, Date as_of,
                                             Direction direction, const TimeToEventConfig& cfg) {
    if (models.empty()) throw ConfigError("time-to-event needs at least one fitted lag model");
    if (cfg.horizon_days < 1) throw ConfigError("horizon_days must be positive");
    if (!(cfg.smoothing > 0.0)) throw ConfigError("additive smoothing must be positive");

    const auto horizon = static_cast<std::size_t>(cfg.horizon_days);
    TimeToEventPosterior post;
    post.as_of = as_of;
    post.direction = direction;
    post.support.resize(horizon);
    for (std::size_t y = 0; y < horizon; ++y) post.support[y] = static_cast<int>(y);

    // Uniform prior; work in logs. Eventless experts contribute a constant
    // (smoothed zero) and drop out on normalization, so they are skipped.
    std::vector<double> log_post(horizon, 0.0);
    for (const auto& [proxy, input] : experts) {
        if (direction == Direction::uptrend && input.kind == SeriesKind::mobility) continue;
        if (!input.days_since_event) continue;
        const auto m = models.find(proxy);
        if (m == models.end()) throw ConfigError("no lag model for proxy '" + proxy + "'");
        for (std::size_t y = 0; y < horizon; ++y) {
            const double lag = static_cast<double>(y) + *input.days_since_event;
            log_post[y] += std::log(kde_pdf(m->second, lag) + cfg.smoothing);
        }
    }
    const double peak = *std::max_element(log_post.begin(), log_post.end());
    post.pmf.resize(horizon);
    double total = 0.0;
    for (std::size_t y = 0; y < horizon; ++y) {
        post.pmf[y] = std::exp(log_post[y] - peak);
        total += post.pmf[y];
    }
    for (auto& v : post.pmf) v /= total;
    return post;
}

}  // namespace ewarn
