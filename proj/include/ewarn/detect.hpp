#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "ewarn/date.hpp"
#include "ewarn/ts_core.hpp"

namespace ewarn {

enum class Direction { uptrend, downtrend };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view s);

struct Interval {
    double lo;
    double hi;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Sampler and event-rule settings. prior_alpha / prior_beta are the shape and
/// scale of the inverse-Gamma prior on the noise variance; they are unrelated
/// to the exponential amplitude.
struct DetectorConfig {
    int window_days = 14;
    int n_draws = 5000;
    int burn_in = 500;
    int thin = 5;
    double prior_alpha = 4.0;
    double prior_beta = 1.0;
    Interval gamma_bounds{-2.0, 2.0};
    Interval beta_bounds{1e-6, 1e6};
    double threshold = 0.05;
    int refractory_days = 14;
    std::uint64_t seed = 0;

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;
    std::size_t retained_draws() const {
        return static_cast<std::size_t>((n_draws - burn_in) / thin);
    }
};

/// Retained samples of amplitude, growth rate (1/day) and noise variance.
struct PosteriorDraws {
    std::vector<double> beta;
    std::vector<double> gamma;
    std::vector<double> sigma2;
    double acceptance_rate = 0.0;  // MH acceptance after burn-in

    std::size_t size() const { return gamma.size(); }
};

struct PValueSeries {
    SeriesRef series_ref;
    Direction direction = Direction::uptrend;
    std::vector<Date> dates;
    std::vector<double> p;
};

struct TrendEvent {
    SeriesRef series_ref;
    Direction direction = Direction::uptrend;
    Date event_date;
    double p_at_event = 0.0;
};

/// Gaussian log-likelihood of the window under y_t = beta * exp(gamma * t),
/// with t counted from the first value of the window.
double log_likelihood(std::span<const double> window, double beta, double gamma, double sigma2);

/// One draw of the noise variance from its inverse-Gamma full conditional:
/// shape N/2 + prior_alpha, scale prior_beta + Σ r²/2.
double gibbs_sigma2(std::span<const double> residuals, const DetectorConfig& cfg, std::mt19937_64& rng);

/// Metropolis-within-Gibbs over (beta, gamma | sigma2) and (sigma2 | beta, gamma).
/// The window is used as given; callers rebase it first.
PosteriorDraws sample_posterior(std::span<const double> window, const DetectorConfig& cfg,
                                std::uint64_t seed);
/// Uses cfg.seed.
PosteriorDraws sample_posterior(const Window& window, const DetectorConfig& cfg);

/// Fraction of draws with gamma <= 0. Small values mean confident growth.
double uptrend_pvalue(const PosteriorDraws& d);
/// Fraction of draws with gamma >= 0. Small values mean confident decay.
double downtrend_pvalue(const PosteriorDraws& d);

struct TrendPValues {
    PValueSeries up;
    PValueSeries down;
};

/// Evaluates every trailing window of `s`. Both directions come from the same
/// draws. Window seeds derive from (cfg.seed, location, proxy_id, end date), so
/// the result is identical for any `threads` value.
TrendPValues trend_pvalues(const DailySeries& s, const DetectorConfig& cfg, unsigned threads = 1);

PValueSeries pvalue_series(const DailySeries& s, Direction direction, const DetectorConfig& cfg,
                           unsigned threads = 1);

/// Batched variant: one task per (series, window) spread over a single pool.
std::vector<TrendPValues> trend_pvalues_batch(std::span<const DailySeries> series,
                                              const DetectorConfig& cfg, unsigned threads);

/// Threshold down-crossings. A crossing closer than refractory_days to the
/// previous kept event is merged into it. The first element is the first-wave event.
std::vector<TrendEvent> detect_events(const PValueSeries& pv, double threshold,
                                      int refractory_days = 14);

}  // namespace ewarn
