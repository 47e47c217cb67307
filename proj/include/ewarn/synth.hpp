#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ewarn/date.hpp"
#include "ewarn/detect.hpp"
#include "ewarn/ts_core.hpp"

namespace ewarn::synth {

/// values[i] = beta * exp(gamma * i) + N(0, sigma^2). Deterministic under seed.
DailySeries gen_exponential_series(double beta, double gamma, double sigma, std::size_t n_days,
                                   std::uint64_t seed, Date start = Date{2020, 1, 1});

struct OracleResult {
    double p_uptrend;
    double error_estimate;  // |fine - coarse| grid difference
    double gamma_lo;        // integration range actually covered
    double gamma_hi;
};

/// P(gamma <= 0 | window) by deterministic quadrature over (beta, gamma) with
/// the noise variance integrated out analytically. Throws NumericalError when
/// the resolution check cannot bound the error below 1e-3.
OracleResult grid_posterior_detail(std::span<const double> window, const DetectorConfig& cfg,
                                   std::size_t points = 2001);
double grid_posterior_oracle(std::span<const double> window, const DetectorConfig& cfg);

/// Same quantity by uniform Monte Carlo over the prior box restricted to the
/// region holding non-negligible posterior mass. Uses no quadrature rule.
double mc_posterior_oracle(std::span<const double> window, const DetectorConfig& cfg,
                           std::size_t samples = 1'000'000, std::uint64_t seed = 1);

struct ProxySpec {
    std::string proxy_id;
    int lead_days = 0;  // onset precedes the gold onset by this many days
    SeriesKind kind = SeriesKind::proxy;
};

struct ScenarioSpec {
    int n_states = 5;
    std::string gold_id = "cases";
    std::vector<ProxySpec> proxies;
    double gamma = 0.1;       // 1/day after onset
    double sigma = 0.0;       // additive Gaussian noise sd
    double baseline = 1.0;    // level before onset
    Date start_date{2020, 1, 1};
    int n_days = 120;
    std::vector<int> onset_days;  // per state, days after start_date; overrides the two below
    int base_onset_day = 50;
    int onset_stagger_days = 3;
    int growth_days = 0;       // if > 0, growth stops after this many days...
    double decay_gamma = 0.0;  // ...and the series then decays at this rate (negative)
    std::uint64_t seed = 1;

    void validate() const;
    int onset_day(int state) const;
    std::string state_name(int state) const;
};

using ScenarioKey = std::pair<std::string, std::string>;  // (state, proxy_id)

/// Gold series plus one series per proxy for every state. Proxy onsets are the
/// gold onset shifted earlier by the proxy lead.
std::map<ScenarioKey, DailySeries> gen_multistate_scenario(const ScenarioSpec& spec);

}  // namespace ewarn::synth
