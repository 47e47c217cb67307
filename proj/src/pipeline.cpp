#include "ewarn/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "ewarn/combine.hpp"
#include "ewarn/csv.hpp"
#include "ewarn/errors.hpp"
#include "ewarn/excess_ili.hpp"
#include "ewarn/leadlag.hpp"
#include "ewarn/report.hpp"
#include "ewarn/synth.hpp"
#include "ewarn/time_to_event.hpp"
#include "json.hpp"

namespace ewarn::pipeline {

namespace fs = std::filesystem;
using Key = std::pair<std::string, std::string>;

namespace {

DailySeries read_declared(const fs::path& path, Cadence cadence) {
    auto obs = read_observation_csv(path);
    try {
        return cadence == Cadence::weekly ? expand_weekly(std::move(obs)) : densify_daily(std::move(obs));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

DailySeries clip(const DailySeries& s, Date first, Date last) {
    DailySeries out = s;
    out.start_date = first;
    const auto from = static_cast<std::size_t>(first - s.start_date);
    const auto n = static_cast<std::size_t>(last - first + 1);
    out.values.assign(s.values.begin() + static_cast<long>(from), s.values.begin() + static_cast<long>(from + n));
    return out;
}

/// Restricts every series to the dates all of them cover.
std::vector<DailySeries> intersect(std::vector<DailySeries> parts, const std::string& what) {
    Date first = parts.front().start_date;
    Date last = parts.front().end_date();
    for (const auto& p : parts) {
        first = std::max(first, p.start_date);
        last = std::min(last, p.end_date());
    }
    if (last < first) throw DataError(what + ": inputs share no dates");
    for (auto& p : parts) p = clip(p, first, last);
    return parts;
}

/// Output files are buffered and written only after every computation
/// succeeded, so a failing run leaves no partial results behind.
class Outputs {
public:
    void add(fs::path path, std::string text) { files_.emplace_back(std::move(path), std::move(text)); }
    void flush() const {
        for (const auto& [path, text] : files_) report::write_text(path, text);
    }

private:
    std::vector<std::pair<fs::path, std::string>> files_;
};

const PValueSeries& pick(const TrendPValues& t, Direction d) { return d == Direction::uptrend ? t.up : t.down; }

constexpr Direction kDirections[] = {Direction::uptrend, Direction::downtrend};

std::vector<std::string> locations_of(const std::vector<DailySeries>& series) {
    std::set<std::string> locs;
    for (const auto& s : series) locs.insert(s.location);
    return {locs.begin(), locs.end()};
}

void require_sources(const PipelineManifest& m) {
    if (m.sources.empty()) throw ConfigError("manifest declares no sources");
}

PValueSeries cut(const PValueSeries& pv, Date last) {
    PValueSeries out;
    out.series_ref = pv.series_ref;
    out.direction = pv.direction;
    for (std::size_t i = 0; i < pv.dates.size() && pv.dates[i] <= last; ++i) {
        out.dates.push_back(pv.dates[i]);
        out.p.push_back(pv.p[i]);
    }
    return out;
}

}  // namespace

PipelineManifest load_manifest(const fs::path& path, const RunOptions& opts) {
    auto m = PipelineManifest::load(path);
    if (opts.seed) m.detector.seed = *opts.seed;
    if (opts.out_dir) m.output_dir = *opts.out_dir;
    return m;
}

std::vector<DailySeries> load_sources(const PipelineManifest& m) {
    require_sources(m);
    std::map<Key, std::vector<const SourceDecl*>> groups;
    for (const auto& d : m.sources) groups[{d.location, d.proxy_id}].push_back(&d);

    std::vector<DailySeries> out;
    for (const auto& [key, decls] : groups) {
        const std::string what = key.first + "/" + key.second;
        const auto& head = *decls.front();
        std::vector<DailySeries> parts;
        std::vector<double> weights;
        for (const auto* d : decls) {
            if (d->kind != head.kind || d->delay_days != head.delay_days) {
                throw ConfigError(what + ": county parts disagree on kind or delay_days");
            }
            DailySeries s = read_declared(d->path, d->cadence);
            if (d->expected_path) {
                auto both = intersect({s, read_declared(*d->expected_path, d->cadence)}, d->path.string());
                s = truncate_excess(both[0], both[1]);
            }
            s.location = d->location;
            s.proxy_id = d->proxy_id;
            s.kind = d->kind;
            s.delay_days = d->delay_days;
            parts.push_back(std::move(s));
            weights.push_back(d->weight);
        }
        DailySeries agg = parts.size() == 1 ? parts.front() : aggregate_weighted(intersect(parts, what), weights);
        if (agg.size() < static_cast<std::size_t>(m.detector.window_days)) {
            throw DataError(what + ": fewer observations than one detection window");
        }
        out.push_back(shift_for_delay(std::move(agg)));
    }
    return out;
}

Detection run_detection(const PipelineManifest& m, unsigned threads) {
    Detection d;
    d.series = load_sources(m);
    d.pvalues = trend_pvalues_batch(d.series, m.detector, threads);
    return d;
}

std::map<Key, TrendEvent> first_wave_events(const Detection& d, Direction direction, double threshold,
                                            int refractory_days, std::optional<Date> last) {
    std::map<Key, TrendEvent> out;
    for (std::size_t i = 0; i < d.series.size(); ++i) {
        const auto& s = d.series[i];
        const auto& full = pick(d.pvalues[i], direction);
        const auto pv = last ? cut(full, *last - s.delay_days) : full;
        const auto events = detect_events(pv, threshold, refractory_days);
        if (!events.empty()) out.emplace(Key{s.location, s.proxy_id}, events.front());
    }
    return out;
}

void cmd_detect(const PipelineManifest& m, unsigned threads) {
    const auto d = run_detection(m, threads);
    const fs::path root = m.output_dir / "detect";
    Outputs out;
    std::vector<TrendEvent> all_events;
    std::map<std::string, std::vector<svg::DetectionPanel>> panels;
    std::map<std::string, std::vector<TrendEvent>> panel_events;
    for (std::size_t i = 0; i < d.series.size(); ++i) {
        const auto& s = d.series[i];
        svg::DetectionPanel panel{s, &d.pvalues[i].up, &d.pvalues[i].down, {}};
        for (const auto dir : kDirections) {
            const auto& pv = pick(d.pvalues[i], dir);
            out.add(root / "pvalues" / s.location / (s.proxy_id + "_" + std::string(to_string(dir)) + ".csv"),
                    report::pvalues_csv(pv));
            const auto ev = detect_events(pv, m.detector.threshold, m.detector.refractory_days);
            all_events.insert(all_events.end(), ev.begin(), ev.end());
            panel.events.insert(panel.events.end(), ev.begin(), ev.end());
        }
        panels[s.location].push_back(std::move(panel));
    }
    out.add(root / "events.json", report::events_json(all_events));
    for (const auto& [loc, p] : panels) {
        out.add(root / "plots" / (loc + ".svg"),
                svg::detection_plot(loc, p, m.plot_smoothing_days, m.detector.threshold));
    }
    out.flush();
}

void cmd_combine(const PipelineManifest& m, unsigned threads) {
    const auto d = run_detection(m, threads);
    const fs::path root = m.output_dir / "combine";
    Outputs out;
    std::vector<TrendEvent> all_events;
    std::size_t written = 0;
    for (const auto& loc : locations_of(d.series)) {
        for (const auto dir : kDirections) {
            // Mobility only carries evidence of decline.
            std::vector<PValueSeries> inputs;
            for (std::size_t i = 0; i < d.series.size(); ++i) {
                const auto& s = d.series[i];
                if (s.location != loc || s.kind == SeriesKind::gold) continue;
                if (s.kind == SeriesKind::mobility && dir == Direction::uptrend) continue;
                inputs.push_back(pick(d.pvalues[i], dir));
            }
            if (inputs.size() < 2) {
                std::cerr << "combine: " << loc << " " << to_string(dir) << ": fewer than two proxies, skipped\n";
                continue;
            }
            const auto combined = combined_pvalue_series(inputs, m.combine);
            out.add(root / "pvalues" / loc / ("combined_" + std::string(to_string(dir)) + ".csv"),
                    report::pvalues_csv(combined));
            const auto ev = detect_combined_events(combined, m.detector.threshold, m.detector.refractory_days);
            all_events.insert(all_events.end(), ev.begin(), ev.end());
            ++written;
        }
    }
    if (written == 0) throw DataError("no location has two or more proxies to combine");
    out.add(root / "events.json", report::events_json(all_events));
    out.flush();
}

void cmd_predict(const PipelineManifest& m, Date as_of, unsigned threads) {
    const auto d = run_detection(m, threads);
    const fs::path root = m.output_dir / "predict";
    const auto locations = locations_of(d.series);
    Outputs out;
    for (const auto dir : kDirections) {
        // Other states contribute their full history to the lag models; the
        // target location only sees data available by as_of.
        const auto history = first_wave_events(d, dir, m.detector.threshold, m.detector.refractory_days);
        const auto current = first_wave_events(d, dir, m.detector.threshold, m.detector.refractory_days, as_of);

        std::map<std::string, SeriesKind> kinds;
        for (const auto& s : d.series) {
            if (s.kind != SeriesKind::gold && s.proxy_id != m.t2e.gold_proxy) kinds[s.proxy_id] = s.kind;
        }
        auto state_events = [&](const std::map<Key, TrendEvent>& events) {
            std::map<std::string, StateEvents> by_state;
            for (const auto& s : d.series) {
                auto& st = by_state[s.location];
                const auto it = events.find({s.location, s.proxy_id});
                if (it == events.end()) continue;
                if (s.proxy_id == m.t2e.gold_proxy) {
                    st.gold_event = it->second.event_date;
                } else if (kinds.contains(s.proxy_id)) {
                    st.proxy_events[s.proxy_id] = it->second.event_date;
                }
            }
            return by_state;
        };
        const auto past = state_events(history);
        auto now = state_events(current);

        for (const auto& loc : locations) {
            std::map<std::string, LagModel> models;
            for (const auto& [id, kind] : kinds) {
                try {
                    models.emplace(id, pool_lags(past, id, m.t2e.bandwidth_floor, {loc}));
                } catch (const DataError&) {
                }
            }
            std::map<std::string, ExpertInput> experts;
            std::vector<TrendEvent> loc_events;
            for (const auto& [id, ev] : now[loc].proxy_events) {
                if (!models.contains(id)) continue;
                experts[id] = ExpertInput{static_cast<double>(as_of - ev), kinds.at(id)};
                loc_events.push_back(current.at({loc, id}));
            }
            TimeToEventPosterior post;
            if (models.empty()) {
                post.as_of = as_of;
                post.direction = dir;
                post.support.resize(static_cast<std::size_t>(m.t2e.horizon_days));
                for (int y = 0; y < m.t2e.horizon_days; ++y) post.support[static_cast<std::size_t>(y)] = y;
                post.pmf.assign(post.support.size(), 1.0 / static_cast<double>(post.support.size()));
            } else {
                post = posterior_time_to_event(experts, models, as_of, dir, m.t2e);
            }
            const std::string stem = "posterior_" + std::string(to_string(dir));
            out.add(root / loc / (stem + ".json"), report::posterior_json(post, loc));
            out.add(root / loc / (stem + ".csv"), report::posterior_csv(post));

            const DailySeries* gold = nullptr;
            DailySeries gold_cut;
            for (const auto& s : d.series) {
                if (s.location == loc && s.proxy_id == m.t2e.gold_proxy) {
                    gold_cut = truncate_after(s, as_of - s.delay_days);
                    gold = &gold_cut;
                }
            }
            out.add(root / loc / (stem + ".svg"), svg::posterior_plot(loc, post, gold, loc_events));
        }
    }
    out.flush();
}

void cmd_excess_ili(const PipelineManifest& m) {
    const auto& cfg = m.excess_ili;
    if (cfg.states.empty()) throw ConfigError("manifest declares no excess_ili states");
    Outputs out;
    for (const auto& st : cfg.states) {
        const auto ili = ili::read_ili_csv(st.ili_path);
        const auto records = ili::read_virology_csv(st.virology_path, ili);
        const auto flu = ili::virology_counterfactual(records);
        const auto [flu_a, act_a] = ili::align(flu, ili.activity_pct);
        const auto mapped = ili::map_flu_to_ili(flu_a, act_a, cfg.precovid_end);
        const auto excess = ili::excess_ili(act_a, mapped);

        const Date season = ili::flu_season_start(ili.activity_pct, cfg.season_threshold_pct);
        const auto& target = cfg.idea_on_counts ? ili.ili_visits : ili.activity_pct;
        const auto fit = ili::fit_idea(target, season, cfg.fit_end, cfg.serial_interval_days);
        std::vector<Date> idea_weeks;
        for (const auto& w : excess.weeks) {
            if (w >= season) idea_weeks.push_back(w);
        }
        const auto idea = ili::idea_counterfactual(fit, idea_weeks);
        std::map<Date, double> idea_at;
        for (std::size_t i = 0; i < idea.size(); ++i) idea_at[idea.weeks[i]] = idea.values[i];
        std::map<Date, double> visits_at;
        for (std::size_t i = 0; i < ili.ili_visits.size(); ++i) visits_at[ili.ili_visits.weeks[i]] = ili.ili_visits.values[i];

        std::ostringstream o;
        o << "week_start,observed_pct,virology_counterfactual_pct,excess_ili_pct,ili_visits,"
          << (cfg.idea_on_counts ? "idea_counterfactual_visits" : "idea_counterfactual_pct") << '\n';
        for (std::size_t i = 0; i < excess.size(); ++i) {
            const Date w = excess.weeks[i];
            o << w.iso() << ',' << csv::format_double(act_a.values[i]) << ','
              << csv::format_double(mapped.values[i]) << ',' << csv::format_double(excess.values[i]) << ',';
            if (const auto v = visits_at.find(w); v != visits_at.end()) o << csv::format_double(v->second);
            o << ',';
            if (const auto v = idea_at.find(w); v != idea_at.end()) o << csv::format_double(v->second);
            o << '\n';
        }
        out.add(m.output_dir / "excess_ili" / (st.location + ".csv"), o.str());

        nlohmann::ordered_json j;
        j["location"] = st.location;
        j["season_start"] = season.iso();
        j["fit_end"] = cfg.fit_end.iso();
        j["r0"] = fit.r0;
        j["d"] = fit.d;
        j["scale"] = fit.scale;
        j["sse"] = fit.sse;
        const auto lm = ili::fit_flu_to_ili(flu_a, act_a, cfg.precovid_end);
        j["ols"] = {{"slope", lm.slope}, {"intercept", lm.intercept}, {"training_weeks", lm.training_weeks}};
        out.add(m.output_dir / "excess_ili" / (st.location + "_fit.json"), j.dump(2) + "\n");
    }
    out.flush();
}

void cmd_leadlag(const PipelineManifest& m, unsigned threads) {
    const auto d = run_detection(m, threads);
    const auto events = first_wave_events(d, Direction::uptrend, m.detector.threshold, m.detector.refractory_days);

    std::set<std::string> references;
    std::set<std::string> inputs;
    for (const auto& s : d.series) {
        if (s.kind == SeriesKind::gold) {
            references.insert(s.proxy_id);
        } else if (s.kind == SeriesKind::proxy) {
            inputs.insert(s.proxy_id);
        }
    }
    if (references.empty()) throw ConfigError("lead/lag needs at least one source of kind 'gold'");

    std::vector<LeadLagSummary> summaries;
    for (const auto& ref : references) {
        for (const auto& in : inputs) {
            try {
                summaries.push_back(summarize_leads(events, in, ref));
            } catch (const DataError& e) {
                std::cerr << "leadlag: " << in << " vs " << ref << ": " << e.what() << "\n";
            }
        }
    }
    if (summaries.empty()) throw DataError("no proxy/reference pair has events in a common state");

    std::map<Key, TrendEvent> proxy_events;
    for (const auto& [key, ev] : events) {
        if (inputs.contains(key.second)) proxy_events.emplace(key, ev);
    }

    Outputs out;
    const fs::path root = m.output_dir / "leadlag";
    out.add(root / "diffs.csv", report::leadlag_csv(summaries));
    out.add(root / "summary.json", report::leadlag_json(summaries));
    out.add(root / "first_activation.json", report::tally_json(first_activation_tally(proxy_events), Direction::uptrend));
    out.flush();
}

void cmd_simulate(const fs::path& spec_path, const fs::path& out_dir, std::optional<std::uint64_t> seed) {
    auto spec = load_scenario_spec(spec_path);
    if (seed) spec.seed = *seed;
    const auto scenario = synth::gen_multistate_scenario(spec);

    std::map<std::string, SeriesKind> kinds{{spec.gold_id, SeriesKind::gold}};
    for (const auto& p : spec.proxies) kinds[p.proxy_id] = p.kind;

    Outputs out;
    nlohmann::ordered_json manifest;
    manifest["seed"] = spec.seed;
    manifest["output_dir"] = "out";
    manifest["t2e"] = {{"gold_proxy", spec.gold_id}};
    manifest["sources"] = nlohmann::ordered_json::array();
    for (const auto& [key, s] : scenario) {
        const fs::path rel = fs::path("data") / key.first / (key.second + ".csv");
        std::ostringstream o;
        o << "date,value\n";
        for (std::size_t i = 0; i < s.size(); ++i) o << s.date_at(i).iso() << ',' << csv::format_double(s.values[i]) << '\n';
        out.add(out_dir / rel, o.str());
        manifest["sources"].push_back({{"path", rel.generic_string()},
                                       {"proxy_id", key.second},
                                       {"location", key.first},
                                       {"kind", std::string(to_string(kinds.at(key.second)))}});
    }
    out.add(out_dir / "manifest.json", manifest.dump(2) + "\n");

    nlohmann::ordered_json truth = nlohmann::ordered_json::object();
    for (int st = 0; st < spec.n_states; ++st) {
        nlohmann::ordered_json onsets;
        const Date gold_onset = spec.start_date + spec.onset_day(st);
        onsets[spec.gold_id] = gold_onset.iso();
        for (const auto& p : spec.proxies) onsets[p.proxy_id] = (gold_onset - p.lead_days).iso();
        truth[spec.state_name(st)] = onsets;
    }
    out.add(out_dir / "truth.json", truth.dump(2) + "\n");
    out.flush();
}

}  // namespace ewarn::pipeline
