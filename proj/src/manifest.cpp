#include "ewarn/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ewarn/errors.hpp"

namespace ewarn {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
}

Interval get_interval(const json& obj, const char* key, Interval fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError(where + "." + key + " must be a [lo, hi] pair");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

Date get_date(const json& obj, const char* key, Date fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return Date::parse(obj.at(key).get<std::string>());
    } catch (const std::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

json parse_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + " is not valid JSON: " + e.what());
    }
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

DetectorConfig parse_detector(const json& j, DetectorConfig cfg) {
    const std::string w = "detector";
    check_keys(j, {"window_days", "n_draws", "burn_in", "thin", "prior_alpha", "prior_beta", "gamma_bounds",
                   "beta_bounds", "threshold", "refractory_days", "seed"},
               w);
    cfg.window_days = get_or(j, "window_days", cfg.window_days, w);
    cfg.n_draws = get_or(j, "n_draws", cfg.n_draws, w);
    cfg.burn_in = get_or(j, "burn_in", cfg.burn_in, w);
    cfg.thin = get_or(j, "thin", cfg.thin, w);
    cfg.prior_alpha = get_or(j, "prior_alpha", cfg.prior_alpha, w);
    cfg.prior_beta = get_or(j, "prior_beta", cfg.prior_beta, w);
    cfg.gamma_bounds = get_interval(j, "gamma_bounds", cfg.gamma_bounds, w);
    cfg.beta_bounds = get_interval(j, "beta_bounds", cfg.beta_bounds, w);
    cfg.threshold = get_or(j, "threshold", cfg.threshold, w);
    cfg.refractory_days = get_or(j, "refractory_days", cfg.refractory_days, w);
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed, w);
    return cfg;
}

}  // namespace

PipelineManifest PipelineManifest::parse(const std::string& json_text, const std::filesystem::path& base_dir) {
    const json root = parse_text(json_text, "manifest");
    check_keys(root, {"sources", "detector", "combine", "t2e", "excess_ili", "output_dir", "seed",
                      "plot_smoothing_days"},
               "manifest");
    PipelineManifest m;
    if (root.contains("detector")) m.detector = parse_detector(root.at("detector"), m.detector);
    if (root.contains("seed")) m.detector.seed = get_or<std::uint64_t>(root, "seed", 0, "manifest");
    m.detector.validate();
    m.output_dir = resolve(base_dir, get_or<std::string>(root, "output_dir", "out", "manifest"));
    m.plot_smoothing_days = get_or(root, "plot_smoothing_days", m.plot_smoothing_days, "manifest");
    if (m.plot_smoothing_days < 1) throw ConfigError("plot_smoothing_days must be >= 1");

    if (root.contains("sources")) {
        const auto& arr = root.at("sources");
        if (!arr.is_array()) throw ConfigError("manifest.sources must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string w = "sources[" + std::to_string(i) + "]";
            const auto& s = arr[i];
            check_keys(s, {"path", "proxy_id", "location", "kind", "delay_days", "weight", "cadence", "expected_path"},
                       w);
            SourceDecl d;
            if (!s.contains("path") || !s.contains("proxy_id") || !s.contains("location")) {
                throw ConfigError(w + " needs path, proxy_id and location");
            }
            d.path = resolve(base_dir, get_or<std::string>(s, "path", "", w));
            d.proxy_id = get_or<std::string>(s, "proxy_id", "", w);
            d.location = get_or<std::string>(s, "location", "", w);
            if (d.proxy_id.empty() || d.location.empty()) throw ConfigError(w + ": empty proxy_id or location");
            if (d.proxy_id == "combined") throw ConfigError(w + ": proxy_id 'combined' is reserved");
            d.kind = parse_series_kind(get_or<std::string>(s, "kind", "proxy", w));
            d.delay_days = get_or(s, "delay_days", 0, w);
            if (d.delay_days < 0) throw ConfigError(w + ".delay_days must be non-negative");
            d.weight = get_or(s, "weight", 1.0, w);
            if (!(d.weight > 0.0)) throw ConfigError(w + ".weight must be positive");
            const auto cadence = get_or<std::string>(s, "cadence", "daily", w);
            if (cadence == "daily") {
                d.cadence = Cadence::daily;
            } else if (cadence == "weekly") {
                d.cadence = Cadence::weekly;
            } else {
                throw ConfigError(w + ".cadence must be 'daily' or 'weekly'");
            }
            if (s.contains("expected_path")) {
                d.expected_path = resolve(base_dir, get_or<std::string>(s, "expected_path", "", w));
            }
            m.sources.push_back(std::move(d));
        }
    }

    if (root.contains("combine")) {
        const auto& c = root.at("combine");
        check_keys(c, {"p_floor", "weights"}, "combine");
        m.combine.p_floor = get_or(c, "p_floor", m.combine.p_floor, "combine");
        if (!(m.combine.p_floor > 0.0 && m.combine.p_floor < 1.0)) throw ConfigError("combine.p_floor must be in (0, 1)");
        if (c.contains("weights")) {
            if (!c.at("weights").is_object()) throw ConfigError("combine.weights must map proxy_id to weight");
            for (const auto& [k, v] : c.at("weights").items()) {
                if (!v.is_number() || !(v.get<double>() > 0.0)) {
                    throw ConfigError("combine.weights." + k + " must be a positive number");
                }
                m.combine.weights[k] = v.get<double>();
            }
        }
    }

    if (root.contains("t2e")) {
        const auto& t = root.at("t2e");
        check_keys(t, {"smoothing", "bandwidth_floor", "gold_proxy", "horizon_days"}, "t2e");
        m.t2e.smoothing = get_or(t, "smoothing", m.t2e.smoothing, "t2e");
        m.t2e.bandwidth_floor = get_or(t, "bandwidth_floor", m.t2e.bandwidth_floor, "t2e");
        m.t2e.gold_proxy = get_or(t, "gold_proxy", m.t2e.gold_proxy, "t2e");
        m.t2e.horizon_days = get_or(t, "horizon_days", m.t2e.horizon_days, "t2e");
        if (!(m.t2e.smoothing > 0.0)) throw ConfigError("t2e.smoothing must be positive");
        if (!(m.t2e.bandwidth_floor > 0.0)) throw ConfigError("t2e.bandwidth_floor must be positive");
        if (m.t2e.horizon_days < 1) throw ConfigError("t2e.horizon_days must be positive");
    }

    if (root.contains("excess_ili")) {
        const auto& e = root.at("excess_ili");
        const std::string w = "excess_ili";
        check_keys(e, {"states", "fit_end", "precovid_end", "season_threshold_pct", "serial_interval_days",
                       "idea_target"},
                   w);
        m.excess_ili.fit_end = get_date(e, "fit_end", m.excess_ili.fit_end, w);
        m.excess_ili.precovid_end = get_date(e, "precovid_end", m.excess_ili.precovid_end, w);
        m.excess_ili.season_threshold_pct = get_or(e, "season_threshold_pct", m.excess_ili.season_threshold_pct, w);
        m.excess_ili.serial_interval_days = get_or(e, "serial_interval_days", m.excess_ili.serial_interval_days, w);
        const auto target = get_or<std::string>(e, "idea_target", "counts", w);
        if (target != "counts" && target != "activity") throw ConfigError(w + ".idea_target must be counts or activity");
        m.excess_ili.idea_on_counts = target == "counts";
        if (e.contains("states")) {
            if (!e.at("states").is_array()) throw ConfigError(w + ".states must be an array");
            for (const auto& s : e.at("states")) {
                check_keys(s, {"location", "ili", "virology"}, w + ".states[]");
                if (!s.contains("location") || !s.contains("ili") || !s.contains("virology")) {
                    throw ConfigError(w + ".states[] needs location, ili and virology");
                }
                m.excess_ili.states.push_back({s.at("location").get<std::string>(),
                                               resolve(base_dir, s.at("ili").get<std::string>()),
                                               resolve(base_dir, s.at("virology").get<std::string>())});
            }
        }
    }
    return m;
}

PipelineManifest PipelineManifest::load(const std::filesystem::path& path) {
    return parse(slurp(path), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

synth::ScenarioSpec parse_scenario_spec(const std::string& json_text) {
    const json j = parse_text(json_text, "scenario spec");
    const std::string w = "scenario";
    check_keys(j, {"n_states", "gold_id", "proxies", "gamma", "sigma", "baseline", "start_date", "n_days",
                   "onset_days", "base_onset_day", "onset_stagger_days", "growth_days", "decay_gamma", "seed"},
               w);
    synth::ScenarioSpec s;
    s.n_states = get_or(j, "n_states", s.n_states, w);
    s.gold_id = get_or(j, "gold_id", s.gold_id, w);
    s.gamma = get_or(j, "gamma", s.gamma, w);
    s.sigma = get_or(j, "sigma", s.sigma, w);
    s.baseline = get_or(j, "baseline", s.baseline, w);
    s.start_date = get_date(j, "start_date", s.start_date, w);
    s.n_days = get_or(j, "n_days", s.n_days, w);
    s.onset_days = get_or(j, "onset_days", s.onset_days, w);
    s.base_onset_day = get_or(j, "base_onset_day", s.base_onset_day, w);
    s.onset_stagger_days = get_or(j, "onset_stagger_days", s.onset_stagger_days, w);
    s.growth_days = get_or(j, "growth_days", s.growth_days, w);
    s.decay_gamma = get_or(j, "decay_gamma", s.decay_gamma, w);
    s.seed = get_or<std::uint64_t>(j, "seed", s.seed, w);
    if (j.contains("proxies")) {
        if (!j.at("proxies").is_array()) throw ConfigError("scenario.proxies must be an array");
        for (const auto& p : j.at("proxies")) {
            check_keys(p, {"proxy_id", "lead_days", "kind"}, "scenario.proxies[]");
            synth::ProxySpec ps;
            ps.proxy_id = get_or<std::string>(p, "proxy_id", "", w);
            ps.lead_days = get_or(p, "lead_days", 0, w);
            ps.kind = parse_series_kind(get_or<std::string>(p, "kind", "proxy", w));
            s.proxies.push_back(ps);
        }
    }
    s.validate();
    return s;
}

synth::ScenarioSpec load_scenario_spec(const std::filesystem::path& path) {
    return parse_scenario_spec(slurp(path));
}

}  // namespace ewarn
