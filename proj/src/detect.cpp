#include "ewarn/detect.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "ewarn/errors.hpp"
#include "ewarn/seeding.hpp"

namespace ewarn {

std::string_view to_string(Direction d) {
    return d == Direction::uptrend ? "uptrend" : "downtrend";
}

Direction parse_direction(std::string_view s) {
    if (s == "uptrend") return Direction::uptrend;
    if (s == "downtrend") return Direction::downtrend;
    throw ConfigError("unknown direction '" + std::string(s) + "'");
}

void DetectorConfig::validate() const {
    if (window_days < 3) throw ConfigError("window_days must be >= 3");
    if (n_draws < 1) throw ConfigError("n_draws must be positive");
    if (burn_in < 0 || burn_in >= n_draws) throw ConfigError("burn_in must be in [0, n_draws)");
    if (thin < 1) throw ConfigError("thin must be >= 1");
    if (retained_draws() == 0) throw ConfigError("no draws retained after burn-in and thinning");
    if (!(prior_alpha > 0.0) || !(prior_beta > 0.0)) {
        throw ConfigError("inverse-Gamma prior parameters must be positive");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must be in (0, 1)");
    if (!(gamma_bounds.lo < gamma_bounds.hi)) throw ConfigError("gamma_bounds must be non-empty");
    if (!(beta_bounds.lo < beta_bounds.hi) || !(beta_bounds.lo > 0.0)) {
        throw ConfigError("beta_bounds must be a non-empty positive interval");
    }
    if (refractory_days < 0) throw ConfigError("refractory_days must be non-negative");
}

double log_likelihood(std::span<const double> window, double beta, double gamma, double sigma2) {
    if (!(sigma2 > 0.0)) throw NumericalError("log_likelihood: sigma2 must be positive");
    const double norm = -0.5 * std::log(2.0 * std::numbers::pi * sigma2);
    double ll = 0.0;
    for (std::size_t t = 0; t < window.size(); ++t) {
        const double r = window[t] - beta * std::exp(gamma * static_cast<double>(t));
        ll += norm - r * r / (2.0 * sigma2);
    }
    return ll;
}

double gibbs_sigma2(std::span<const double> residuals, const DetectorConfig& cfg, std::mt19937_64& rng) {
    double ss = 0.0;
    for (double r : residuals) ss += r * r;
    const double shape = 0.5 * static_cast<double>(residuals.size()) + cfg.prior_alpha;
    const double scale = cfg.prior_beta + 0.5 * ss;
    std::gamma_distribution<double> g(shape, 1.0);
    return scale / g(rng);
}

namespace {

double sum_sq_residuals(std::span<const double> y, double beta, double gamma) {
    const double growth = std::exp(gamma);
    double level = beta;
    double ss = 0.0;
    for (double v : y) {
        const double r = v - level;
        ss += r * r;
        level *= growth;
    }
    return ss;
}

void fill_residuals(std::span<const double> y, double beta, double gamma, std::vector<double>& out) {
    const double growth = std::exp(gamma);
    double level = beta;
    for (std::size_t t = 0; t < y.size(); ++t) {
        out[t] = y[t] - level;
        level *= growth;
    }
}

/// Lower-triangular Cholesky factor of a 2x2 covariance.
struct Chol2 {
    double l11, l21, l22;
};

Chol2 cholesky(double c11, double c12, double c22) {
    const double l11 = std::sqrt(c11);
    const double l21 = c12 / l11;
    const double l22 = std::sqrt(std::max(c22 - l21 * l21, 1e-12 * c22));
    return {l11, l21, l22};
}

// Burn-in adaptation schedule for the random-walk proposal.
constexpr int kAdaptBatch = 50;
constexpr double kTargetAcceptance = 0.3;

}  // namespace

PosteriorDraws sample_posterior(std::span<const double> y, const DetectorConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (y.size() < 2) throw DataError("window needs at least two observations");
    for (double v : y) {
        if (!std::isfinite(v)) throw DataError("window contains non-finite values");
    }
    const std::size_t n = y.size();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> std_normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // Start at the log-linear least-squares slope with the first value as level.
    double beta = std::clamp(y[0], cfg.beta_bounds.lo, cfg.beta_bounds.hi);
    double gamma = 0.0;
    {
        double st = 0, sl = 0, stt = 0, stl = 0;
        for (std::size_t t = 0; t < n; ++t) {
            const double tt = static_cast<double>(t);
            const double l = std::log(std::max(y[t], 1e-12));
            st += tt;
            sl += l;
            stt += tt * tt;
            stl += tt * l;
        }
        const double nn = static_cast<double>(n);
        gamma = (nn * stl - st * sl) / (nn * stt - st * st);
        gamma = std::clamp(gamma, cfg.gamma_bounds.lo, cfg.gamma_bounds.hi);
    }
    std::vector<double> resid(n);
    fill_residuals(y, beta, gamma, resid);
    double sigma2 = 0.0;
    {
        double mean = 0.0;
        for (double r : resid) mean += r;
        mean /= static_cast<double>(n);
        for (double r : resid) sigma2 += (r - mean) * (r - mean);
        sigma2 = std::max(sigma2 / static_cast<double>(n - 1), 1e-6);
    }

    double step_beta = 0.1 * beta;
    double step_gamma = 0.05;
    Chol2 chol{step_beta, 0.0, step_gamma};
    double scale = 1.0;

    PosteriorDraws out;
    const std::size_t keep = cfg.retained_draws();
    out.beta.reserve(keep);
    out.gamma.reserve(keep);
    out.sigma2.reserve(keep);

    std::vector<double> hist_beta, hist_gamma;
    hist_beta.reserve(static_cast<std::size_t>(cfg.burn_in));
    hist_gamma.reserve(static_cast<std::size_t>(cfg.burn_in));

    double ss = sum_sq_residuals(y, beta, gamma);
    int batch_accepts = 0;
    long kept_accepts = 0;
    long kept_steps = 0;

    for (int it = 0; it < cfg.n_draws; ++it) {
        // Metropolis step on (beta, gamma) given sigma2; flat priors inside bounds.
        const double z1 = std_normal(rng);
        const double z2 = std_normal(rng);
        const double prop_beta = beta + scale * chol.l11 * z1;
        const double prop_gamma = gamma + scale * (chol.l21 * z1 + chol.l22 * z2);
        const double u = unif(rng);
        bool accepted = false;
        if (cfg.beta_bounds.contains(prop_beta) && cfg.gamma_bounds.contains(prop_gamma)) {
            const double prop_ss = sum_sq_residuals(y, prop_beta, prop_gamma);
            const double log_ratio = -(prop_ss - ss) / (2.0 * sigma2);
            if (log_ratio >= 0.0 || std::log(u) < log_ratio) {
                beta = prop_beta;
                gamma = prop_gamma;
                ss = prop_ss;
                accepted = true;
            }
        }

        // Gibbs step on sigma2 given (beta, gamma).
        fill_residuals(y, beta, gamma, resid);
        sigma2 = gibbs_sigma2(resid, cfg, rng);

        if (it < cfg.burn_in) {
            hist_beta.push_back(beta);
            hist_gamma.push_back(gamma);
            batch_accepts += accepted ? 1 : 0;
            if ((it + 1) % kAdaptBatch == 0) {
                const double rate = static_cast<double>(batch_accepts) / kAdaptBatch;
                scale *= std::exp(rate - kTargetAcceptance);
                if (rate < 0.2) scale *= 0.7;
                if (rate > 0.5) scale *= 1.4;
                batch_accepts = 0;
                // Re-estimate the proposal shape from the second half of the history.
                const std::size_t m = hist_beta.size();
                if (m >= 4 * kAdaptBatch) {
                    const std::size_t from = m / 2;
                    const double k = static_cast<double>(m - from);
                    double mb = 0, mg = 0;
                    for (std::size_t i = from; i < m; ++i) {
                        mb += hist_beta[i];
                        mg += hist_gamma[i];
                    }
                    mb /= k;
                    mg /= k;
                    double cbb = 0, cbg = 0, cgg = 0;
                    for (std::size_t i = from; i < m; ++i) {
                        const double db = hist_beta[i] - mb;
                        const double dg = hist_gamma[i] - mg;
                        cbb += db * db;
                        cbg += db * dg;
                        cgg += dg * dg;
                    }
                    cbb /= k - 1;
                    cbg /= k - 1;
                    cgg /= k - 1;
                    if (cbb > 0.0 && cgg > 0.0 && cbg * cbg < 0.999999 * cbb * cgg) {
                        const Chol2 fresh = cholesky(cbb, cbg, cgg);
                        // Only adopt the empirical shape once the chain actually moved.
                        if (std::isfinite(fresh.l22) && fresh.l11 > 0.0) {
                            chol = fresh;
                            scale = std::clamp(scale, 0.5, 2.4);
                        }
                    }
                }
            }
            continue;
        }

        ++kept_steps;
        kept_accepts += accepted ? 1 : 0;
        const int offset = it - cfg.burn_in + 1;
        if (offset % cfg.thin == 0 && out.gamma.size() < keep) {
            out.beta.push_back(beta);
            out.gamma.push_back(gamma);
            out.sigma2.push_back(sigma2);
        }
    }
    out.acceptance_rate =
        kept_steps > 0 ? static_cast<double>(kept_accepts) / static_cast<double>(kept_steps) : 0.0;
    return out;
}

PosteriorDraws sample_posterior(const Window& window, const DetectorConfig& cfg) {
    return sample_posterior(window.values, cfg, cfg.seed);
}

double uptrend_pvalue(const PosteriorDraws& d) {
    if (d.gamma.empty()) throw DataError("no posterior draws");
    const auto hits = std::count_if(d.gamma.begin(), d.gamma.end(), [](double g) { return g <= 0.0; });
    return static_cast<double>(hits) / static_cast<double>(d.gamma.size());
}

double downtrend_pvalue(const PosteriorDraws& d) {
    if (d.gamma.empty()) throw DataError("no posterior draws");
    const auto hits = std::count_if(d.gamma.begin(), d.gamma.end(), [](double g) { return g >= 0.0; });
    return static_cast<double>(hits) / static_cast<double>(d.gamma.size());
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count && !failed; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

TrendPValues empty_result(const DailySeries& s, std::size_t count) {
    TrendPValues r;
    r.up.series_ref = r.down.series_ref = s.ref();
    r.up.direction = Direction::uptrend;
    r.down.direction = Direction::downtrend;
    r.up.dates.resize(count);
    r.down.dates.resize(count);
    r.up.p.resize(count);
    r.down.p.resize(count);
    return r;
}

void evaluate_window(const DailySeries& s, std::size_t k, const DetectorConfig& cfg, TrendPValues& r) {
    const auto width = static_cast<std::size_t>(cfg.window_days);
    const std::size_t end = width - 1 + k;
    const Window w = rebase_min_one(window_at(s, end, width));
    const auto seed = seeding::window_seed(cfg.seed, s.location, s.proxy_id, w.end_date.serial());
    const PosteriorDraws draws = sample_posterior(w.values, cfg, seed);
    r.up.dates[k] = r.down.dates[k] = w.end_date;
    r.up.p[k] = uptrend_pvalue(draws);
    r.down.p[k] = downtrend_pvalue(draws);
}

std::size_t window_count(const DailySeries& s, const DetectorConfig& cfg) {
    const auto width = static_cast<std::size_t>(cfg.window_days);
    if (s.size() < width) {
        throw DataError("series " + s.location + "/" + s.proxy_id + " has " +
                        std::to_string(s.size()) + " days, shorter than one window (" +
                        std::to_string(width) + ")");
    }
    return s.size() - width + 1;
}

}  // namespace

TrendPValues trend_pvalues(const DailySeries& s, const DetectorConfig& cfg, unsigned threads) {
    cfg.validate();
    const std::size_t count = window_count(s, cfg);
    TrendPValues r = empty_result(s, count);
    parallel_for(count, threads, [&](std::size_t k) { evaluate_window(s, k, cfg, r); });
    return r;
}

std::vector<TrendPValues> trend_pvalues_batch(std::span<const DailySeries> series,
                                              const DetectorConfig& cfg, unsigned threads) {
    cfg.validate();
    std::vector<TrendPValues> results;
    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    results.reserve(series.size());
    for (std::size_t j = 0; j < series.size(); ++j) {
        const std::size_t count = window_count(series[j], cfg);
        results.push_back(empty_result(series[j], count));
        for (std::size_t k = 0; k < count; ++k) tasks.emplace_back(j, k);
    }
    parallel_for(tasks.size(), threads, [&](std::size_t i) {
        const auto [j, k] = tasks[i];
        evaluate_window(series[j], k, cfg, results[j]);
    });
    return results;
}

PValueSeries pvalue_series(const DailySeries& s, Direction direction, const DetectorConfig& cfg,
                           unsigned threads) {
    auto both = trend_pvalues(s, cfg, threads);
    return direction == Direction::uptrend ? std::move(both.up) : std::move(both.down);
}

std::vector<TrendEvent> detect_events(const PValueSeries& pv, double threshold, int refractory_days) {
    if (pv.dates.size() != pv.p.size()) throw DataError("p-value series dates and values differ in length");
    std::vector<TrendEvent> events;
    bool below = false;
    for (std::size_t i = 0; i < pv.p.size(); ++i) {
        const bool now_below = pv.p[i] < threshold;
        if (now_below && !below) {
            if (events.empty() || pv.dates[i] - events.back().event_date >= refractory_days) {
                events.push_back({pv.series_ref, pv.direction, pv.dates[i], pv.p[i]});
            }
        }
        below = now_below;
    }
    return events;
}

}  // namespace ewarn
