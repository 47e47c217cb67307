#include "ewarn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ewarn/errors.hpp"
#include "ewarn/seeding.hpp"

namespace ewarn::synth {

DailySeries gen_exponential_series(double beta, double gamma, double sigma, std::size_t n_days,
                                   std::uint64_t seed, Date start) {
    if (!(beta > 0.0)) throw ConfigError("gen_exponential_series: beta must be positive");
    if (n_days < 1) throw ConfigError("gen_exponential_series: n_days must be >= 1");
    if (sigma < 0.0) throw ConfigError("gen_exponential_series: sigma must be non-negative");
    DailySeries s;
    s.location = "SYN";
    s.proxy_id = "synthetic";
    s.start_date = start;
    s.values.resize(n_days);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < n_days; ++i) {
        const double eps = sigma > 0.0 ? sigma * noise(rng) : 0.0;
        s.values[i] = beta * std::exp(gamma * static_cast<double>(i)) + eps;
    }
    return s;
}

namespace {

// Posterior of (beta, gamma) with sigma2 integrated against its inverse-Gamma
// prior: density ∝ (b0 + S/2)^-(N/2 + alpha), S the residual sum of squares.
// For fixed gamma, S is quadratic in beta: S = S_min + A (beta - beta_hat)^2.
struct Profile {
    std::span<const double> y;
    double b0;
    double m;
    double sum_y2;

    struct AtGamma {
        double a;         // Σ g_t^2
        double beta_hat;  // Σ y g / Σ g^2
        double s_min;     // residual SS at beta_hat
    };

    AtGamma at(double gamma) const {
        double a = 0, b = 0;
        for (std::size_t t = 0; t < y.size(); ++t) {
            const double g = std::exp(gamma * static_cast<double>(t));
            a += g * g;
            b += y[t] * g;
        }
        return {a, b / a, std::max(sum_y2 - b * b / a, 0.0)};
    }

    // Log of the beta-marginal up to a constant, ignoring the beta bounds.
    double log_marginal(const AtGamma& g) const {
        return -(m - 0.5) * std::log(b0 + 0.5 * g.s_min) - 0.5 * std::log(g.a);
    }

    // Half-width (in beta) beyond which the conditional density falls below
    // exp(-tail) of its peak.
    double beta_halfwidth(const AtGamma& g, double tail) const {
        const double u2 = std::expm1(tail / m);
        return std::sqrt(u2 * (2.0 * b0 + g.s_min) / g.a);
    }
};

Profile make_profile(std::span<const double> y, const DetectorConfig& cfg) {
    double s2 = 0.0;
    for (double v : y) s2 += v * v;
    return {y, cfg.prior_beta, 0.5 * static_cast<double>(y.size()) + cfg.prior_alpha, s2};
}

constexpr double kTail = 45.0;  // exp(-45) relative density is treated as zero
constexpr double kMcTail = 20.0;

struct Support {
    double lo, hi;
    double log_density_peak;  // upper bound on log density, used as a scaling reference
};

Support find_support(const Profile& prof, const DetectorConfig& cfg, double tail) {
    constexpr int kScan = 20001;
    const double lo = cfg.gamma_bounds.lo;
    const double hi = cfg.gamma_bounds.hi;
    const double step = (hi - lo) / (kScan - 1);
    std::vector<double> lm(kScan);
    double best = -INFINITY;
    double min_ss = INFINITY;
    for (int i = 0; i < kScan; ++i) {
        const auto at = prof.at(lo + step * i);
        lm[i] = prof.log_marginal(at);
        best = std::max(best, lm[i]);
        min_ss = std::min(min_ss, at.s_min);
    }
    int first = kScan, last = -1;
    for (int i = 0; i < kScan; ++i) {
        if (lm[i] > best - tail) {
            first = std::min(first, i);
            last = std::max(last, i);
        }
    }
    first = std::max(0, first - 2);
    last = std::min(kScan - 1, last + 2);
    return {lo + step * first, lo + step * last, -prof.m * std::log(prof.b0 + 0.5 * min_ss)};
}

std::vector<double> simpson_weights(std::size_t n, double h) {
    std::vector<double> w(n, 0.0);
    if (n == 1) return w;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        w[i] *= h / 3.0;
    }
    return w;
}

// ∫∫ over gamma in [g0, g1] of the un-normalized posterior (scaled by exp(-ref)).
double integrate_block(const Profile& prof, const DetectorConfig& cfg, double g0, double g1,
                       std::size_t n, double ref) {
    if (!(g1 > g0)) return 0.0;
    const double hg = (g1 - g0) / static_cast<double>(n - 1);
    const auto wg = simpson_weights(n, hg);
    const double two_b0 = 2.0 * prof.b0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto at = prof.at(g0 + hg * static_cast<double>(i));
        const double half = prof.beta_halfwidth(at, kTail);
        const double b_lo = std::max(cfg.beta_bounds.lo, at.beta_hat - half);
        const double b_hi = std::min(cfg.beta_bounds.hi, at.beta_hat + half);
        if (!(b_hi > b_lo)) continue;
        const double hb = (b_hi - b_lo) / static_cast<double>(n - 1);
        double inner = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = b_lo + hb * static_cast<double>(j) - at.beta_hat;
            const double s = at.s_min + at.a * d * d;
            const double wb = (j == 0 || j == n - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            inner += wb * std::exp(-prof.m * std::log(0.5 * (two_b0 + s)) - ref);
        }
        total += wg[i] * inner * hb / 3.0;
    }
    return total;
}

double grid_p(const Profile& prof, const DetectorConfig& cfg, const Support& sup, std::size_t n) {
    const double ref = sup.log_density_peak;
    const double neg = integrate_block(prof, cfg, sup.lo, std::min(sup.hi, 0.0), n, ref);
    const double pos = integrate_block(prof, cfg, std::max(sup.lo, 0.0), sup.hi, n, ref);
    const double total = neg + pos;
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw NumericalError("grid oracle: posterior mass underflowed");
    }
    return neg / total;
}

}  // namespace

OracleResult grid_posterior_detail(std::span<const double> window, const DetectorConfig& cfg,
                                   std::size_t points) {
    cfg.validate();
    if (window.size() < 2) throw DataError("grid oracle needs at least two observations");
    if (points < 2001) throw ConfigError("grid oracle needs at least 2001 points per axis");
    if (points % 2 == 0) ++points;
    const Profile prof = make_profile(window, cfg);
    const Support sup = find_support(prof, cfg, kTail);
    const double fine = grid_p(prof, cfg, sup, points);
    const double coarse = grid_p(prof, cfg, sup, ((points - 1) / 2 + 1) | 1);
    const double err = std::abs(fine - coarse);
    if (err > 1e-3) {
        throw NumericalError("grid oracle: resolution check failed (fine " + std::to_string(fine) +
                             ", coarse " + std::to_string(coarse) + ", gamma range [" +
                             std::to_string(sup.lo) + ", " + std::to_string(sup.hi) + "])");
    }
    return {fine, err, sup.lo, sup.hi};
}

double grid_posterior_oracle(std::span<const double> window, const DetectorConfig& cfg) {
    return grid_posterior_detail(window, cfg).p_uptrend;
}

double mc_posterior_oracle(std::span<const double> window, const DetectorConfig& cfg,
                           std::size_t samples, std::uint64_t seed) {
    cfg.validate();
    if (window.size() < 2) throw DataError("MC oracle needs at least two observations");
    if (samples < 1000) throw ConfigError("MC oracle needs at least 1000 samples");
    const Profile prof = make_profile(window, cfg);
    const Support sup = find_support(prof, cfg, kMcTail);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double ref = sup.log_density_peak;
    // Jittered stratification: gamma and the relative beta position each get
    // kStrata equal cells, with one uniform draw per (gamma, beta) cell pair.
    const std::size_t strata = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::sqrt(static_cast<double>(samples))));
    const double cell = (sup.hi - sup.lo) / static_cast<double>(strata);
    const double inv = 1.0 / static_cast<double>(strata);
    double neg = 0.0, total = 0.0;
    for (std::size_t c = 0; c < strata; ++c) {
        for (std::size_t j = 0; j < strata; ++j) {
            const double gamma = sup.lo + cell * (static_cast<double>(c) + unif(rng));
            // Uniform beta over the gamma-specific slab; the slab width is the
            // importance correction for not sampling the full prior box.
            const auto at = prof.at(gamma);
            const double half = prof.beta_halfwidth(at, kMcTail);
            const double b_lo = std::max(cfg.beta_bounds.lo, at.beta_hat - half);
            const double b_hi = std::min(cfg.beta_bounds.hi, at.beta_hat + half);
            const double u = (static_cast<double>(j) + unif(rng)) * inv;
            if (!(b_hi > b_lo)) continue;
            const double beta = b_lo + (b_hi - b_lo) * u;
            double ss = 0.0;
            for (std::size_t t = 0; t < window.size(); ++t) {
                const double r = window[t] - beta * std::exp(gamma * static_cast<double>(t));
                ss += r * r;
            }
            const double w = (b_hi - b_lo) * std::exp(-prof.m * std::log(prof.b0 + 0.5 * ss) - ref);
            total += w;
            if (gamma <= 0.0) neg += w;
        }
    }
    if (!(total > 0.0)) throw NumericalError("MC oracle: all importance weights vanished");
    return neg / total;
}

void ScenarioSpec::validate() const {
    if (n_states < 1) throw ConfigError("scenario: n_states must be >= 1");
    if (sigma < 0.0) throw ConfigError("scenario: sigma must be non-negative");
    if (!(baseline > 0.0)) throw ConfigError("scenario: baseline must be positive");
    if (n_days < 1) throw ConfigError("scenario: n_days must be >= 1");
    if (!onset_days.empty() && onset_days.size() != static_cast<std::size_t>(n_states)) {
        throw ConfigError("scenario: onset_days must list one onset per state");
    }
    if (!std::isfinite(gamma) || !std::isfinite(decay_gamma)) {
        throw ConfigError("scenario: growth rates must be finite");
    }
    for (const auto& p : proxies) {
        if (p.proxy_id.empty() || p.proxy_id == gold_id) {
            throw ConfigError("scenario: proxy ids must be non-empty and differ from the gold id");
        }
    }
}

int ScenarioSpec::onset_day(int state) const {
    if (!onset_days.empty()) return onset_days.at(static_cast<std::size_t>(state));
    return base_onset_day + onset_stagger_days * state;
}

std::string ScenarioSpec::state_name(int state) const {
    return "S" + std::to_string(state + 1);
}

namespace {

DailySeries onset_curve(const ScenarioSpec& spec, int onset, std::uint64_t seed) {
    DailySeries s;
    s.start_date = spec.start_date;
    s.values.resize(static_cast<std::size_t>(spec.n_days));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int t = 0; t < spec.n_days; ++t) {
        double log_level = 0.0;
        const int since = t - onset;
        if (since > 0) {
            if (spec.growth_days > 0 && since > spec.growth_days) {
                log_level = spec.gamma * spec.growth_days + spec.decay_gamma * (since - spec.growth_days);
            } else {
                log_level = spec.gamma * since;
            }
        }
        const double eps = spec.sigma > 0.0 ? spec.sigma * noise(rng) : 0.0;
        s.values[static_cast<std::size_t>(t)] = spec.baseline * std::exp(log_level) + eps;
    }
    return s;
}

}  // namespace

std::map<ScenarioKey, DailySeries> gen_multistate_scenario(const ScenarioSpec& spec) {
    spec.validate();
    std::map<ScenarioKey, DailySeries> out;
    for (int st = 0; st < spec.n_states; ++st) {
        const std::string state = spec.state_name(st);
        const int onset = spec.onset_day(st);
        auto emit = [&](const std::string& id, int series_onset, SeriesKind kind) {
            const auto seed = seeding::window_seed(spec.seed, state, id, 0);
            DailySeries s = onset_curve(spec, series_onset, seed);
            s.location = state;
            s.proxy_id = id;
            s.kind = kind;
            out.emplace(ScenarioKey{state, id}, std::move(s));
        };
        emit(spec.gold_id, onset, SeriesKind::gold);
        for (const auto& p : spec.proxies) emit(p.proxy_id, onset - p.lead_days, p.kind);
    }
    return out;
}

}  // namespace ewarn::synth
