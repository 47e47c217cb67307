#include "ewarn/excess_ili.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "ewarn/csv.hpp"
#include "ewarn/errors.hpp"

namespace ewarn::ili {

void IdeaFit::validate() const {
    if (!(r0 > 0.0)) throw ConfigError("IDEA r0 must be positive");
    if (!(d >= 0.0)) throw ConfigError("IDEA discount factor must be non-negative");
    if (!(serial_interval_days > 0.0)) throw ConfigError("serial interval must be positive");
}

double IdeaFit::steps_at(Date week) const {
    return static_cast<double>(week - season_start) / serial_interval_days;
}

Date flu_season_start(const WeeklySeries& ili_activity_pct, double threshold_pct) {
    const auto& v = ili_activity_pct.values;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if (v[i] > threshold_pct && v[i + 1] > threshold_pct) return ili_activity_pct.weeks[i];
    }
    throw DataError("no flu season start: never two consecutive weeks above " +
                    csv::format_double(threshold_pct) + "%");
}

namespace {

double log_idea(double r0, double d, double t) {
    return t * std::log(r0) - t * t * std::log1p(d);
}

struct IdeaObjective {
    std::vector<double> steps;
    std::vector<double> counts;

    // SSE with the scale profiled out, plus that scale.
    std::pair<double, double> eval(double r0, double d) const {
        double syi = 0.0, sii = 0.0, syy = 0.0;
        for (std::size_t k = 0; k < steps.size(); ++k) {
            const double inc = std::exp(std::clamp(log_idea(r0, d, steps[k]), -700.0, 700.0));
            syi += counts[k] * inc;
            sii += inc * inc;
            syy += counts[k] * counts[k];
        }
        if (!(sii > 0.0) || !std::isfinite(sii)) return {std::numeric_limits<double>::infinity(), 0.0};
        const double scale = syi / sii;
        double sse = 0.0;
        for (std::size_t k = 0; k < steps.size(); ++k) {
            const double r = counts[k] - scale * std::exp(log_idea(r0, d, steps[k]));
            sse += r * r;
        }
        return {sse, scale};
    }
};

constexpr double kR0Lo = 1.0 + 1e-9;
constexpr double kR0Hi = 10.0;
constexpr double kDLo = 0.0;
constexpr double kDHi = 1.0;

std::array<double, 2> clamp_params(std::array<double, 2> x) {
    return {std::clamp(x[0], kR0Lo, kR0Hi), std::clamp(x[1], kDLo, kDHi)};
}

}  // namespace

double idea_incidence(const IdeaFit& fit, double t) {
    if (t < 0.0) throw ConfigError("IDEA step index must be non-negative");
    return fit.scale * std::pow(fit.r0 / std::pow(1.0 + fit.d, t), t);
}

IdeaFit fit_idea(const WeeklySeries& ili_counts, Date season_start, Date fit_end, double serial_interval_days) {
    IdeaFit fit;
    fit.season_start = season_start;
    fit.serial_interval_days = serial_interval_days;
    fit.validate();

    IdeaObjective obj;
    for (std::size_t i = 0; i < ili_counts.size(); ++i) {
        const Date w = ili_counts.weeks[i];
        if (w < season_start || w > fit_end) continue;
        obj.steps.push_back(fit.steps_at(w));
        obj.counts.push_back(ili_counts.values[i]);
    }
    if (obj.steps.size() < 4) {
        throw DataError("IDEA fit needs at least 4 weekly observations between " + season_start.iso() +
                        " and " + fit_end.iso() + ", found " + std::to_string(obj.steps.size()));
    }

    // Coarse grid; d is sampled quadratically to resolve small discounts.
    constexpr int kGrid = 240;
    std::array<double, 2> best{2.0, 0.0};
    double best_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGrid; ++i) {
        const double r0 = kR0Lo + (kR0Hi - kR0Lo) * std::pow(static_cast<double>(i) / (kGrid - 1), 2.0);
        for (int j = 0; j < kGrid; ++j) {
            const double u = static_cast<double>(j) / (kGrid - 1);
            const double d = kDLo + (kDHi - kDLo) * u * u;
            const double f = obj.eval(r0, d).first;
            if (f < best_f) {
                best_f = f;
                best = {r0, d};
            }
        }
    }

    // Nelder-Mead polish with bound clamping.
    auto f = [&](const std::array<double, 2>& x) { return obj.eval(x[0], x[1]).first; };
    std::array<std::array<double, 2>, 3> simplex{
        best, clamp_params({best[0] + 0.02, best[1]}), clamp_params({best[0], best[1] + 0.005})};
    if (simplex[2][1] == best[1]) simplex[2][1] = best[1] - 0.005;
    std::array<double, 3> fv{f(simplex[0]), f(simplex[1]), f(simplex[2])};

    constexpr int kMaxIter = 20000;
    bool converged = false;
    int iter = 0;
    for (; iter < kMaxIter; ++iter) {
        std::array<int, 3> order{0, 1, 2};
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        const auto lo = order[0], mid = order[1], hi = order[2];
        double diam = 0.0;
        for (int k : {mid, hi}) {
            diam = std::max({diam, std::abs(simplex[k][0] - simplex[lo][0]),
                             std::abs(simplex[k][1] - simplex[lo][1])});
        }
        const double spread = fv[hi] - fv[lo];
        if (diam < 1e-11 || (diam < 1e-7 && spread <= 1e-15 * std::max(1.0, std::abs(fv[lo])))) {
            converged = true;
            break;
        }
        const std::array<double, 2> centroid{(simplex[lo][0] + simplex[mid][0]) / 2,
                                             (simplex[lo][1] + simplex[mid][1]) / 2};
        auto along = [&](double coef) {
            return clamp_params({centroid[0] + coef * (simplex[hi][0] - centroid[0]),
                                 centroid[1] + coef * (simplex[hi][1] - centroid[1])});
        };
        const auto xr = along(-1.0);
        const double fr = f(xr);
        if (fr < fv[lo]) {
            const auto xe = along(-2.0);
            const double fe = f(xe);
            if (fe < fr) {
                simplex[hi] = xe;
                fv[hi] = fe;
            } else {
                simplex[hi] = xr;
                fv[hi] = fr;
            }
        } else if (fr < fv[mid]) {
            simplex[hi] = xr;
            fv[hi] = fr;
        } else {
            const auto xc = fr < fv[hi] ? along(-0.5) : along(0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fv[hi])) {
                simplex[hi] = xc;
                fv[hi] = fc;
            } else {
                for (int k : {mid, hi}) {
                    simplex[k] = {(simplex[k][0] + simplex[lo][0]) / 2, (simplex[k][1] + simplex[lo][1]) / 2};
                    fv[k] = f(simplex[k]);
                }
            }
        }
    }
    if (!converged) {
        throw NumericalError("IDEA fit did not converge after " + std::to_string(iter) +
                             " iterations (best r0=" + csv::format_double(simplex[0][0]) +
                             ", d=" + csv::format_double(simplex[0][1]) + ")");
    }
    const auto best_idx = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    fit.r0 = simplex[best_idx][0];
    fit.d = simplex[best_idx][1];
    const auto [sse, scale] = obj.eval(fit.r0, fit.d);
    fit.sse = sse;
    fit.scale = scale;
    return fit;
}

WeeklySeries idea_counterfactual(const IdeaFit& fit, std::span<const Date> weeks) {
    WeeklySeries out;
    for (const Date w : weeks) {
        if (w < fit.season_start) continue;
        out.weeks.push_back(w);
        out.values.push_back(idea_incidence(fit, fit.steps_at(w)));
    }
    return out;
}

WeeklySeries virology_counterfactual(std::span<const VirologyRecord> records) {
    WeeklySeries out;
    for (const auto& r : records) {
        if (!std::isfinite(r.flu_positive) || !std::isfinite(r.total_specimens) || !std::isfinite(r.ili_visits)) {
            continue;
        }
        if (r.flu_positive < 0 || r.total_specimens < 0 || r.ili_visits < 0) {
            throw DataError("negative virology count in week " + r.week.iso());
        }
        if (r.flu_positive > r.total_specimens) {
            throw DataError("more positive tests than specimens in week " + r.week.iso());
        }
        if (!(r.total_specimens > 0)) continue;
        out.weeks.push_back(r.week);
        out.values.push_back(r.flu_positive * r.ili_visits / r.total_specimens);
    }
    return out;
}

std::pair<WeeklySeries, WeeklySeries> align(const WeeklySeries& a, const WeeklySeries& b) {
    std::map<Date, double> bm;
    for (std::size_t i = 0; i < b.size(); ++i) bm[b.weeks[i]] = b.values[i];
    WeeklySeries ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto it = bm.find(a.weeks[i]);
        if (it == bm.end()) continue;
        ra.weeks.push_back(a.weeks[i]);
        ra.values.push_back(a.values[i]);
        rb.weeks.push_back(it->first);
        rb.values.push_back(it->second);
    }
    return {ra, rb};
}

LinearMap fit_flu_to_ili(const WeeklySeries& flu_counts, const WeeklySeries& ili_activity, Date precovid_end) {
    const auto [flu, ili] = align(flu_counts, ili_activity);
    double n = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < flu.size(); ++i) {
        if (flu.weeks[i] > precovid_end) continue;
        n += 1;
        sx += flu.values[i];
        sy += ili.values[i];
    }
    if (n < 3) {
        throw DataError("flu-to-ILI regression needs at least 3 overlapping weeks up to " + precovid_end.iso());
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < flu.size(); ++i) {
        if (flu.weeks[i] > precovid_end) continue;
        sxx += (flu.values[i] - mx) * (flu.values[i] - mx);
        sxy += (flu.values[i] - mx) * (ili.values[i] - my);
    }
    if (!(sxx > 1e-12 * std::max(1.0, mx * mx * n))) {
        throw NumericalError("flu-to-ILI regression is degenerate: flu counts are constant in training weeks");
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx, static_cast<std::size_t>(n)};
}

WeeklySeries map_flu_to_ili(const WeeklySeries& flu_counts, const WeeklySeries& ili_activity, Date precovid_end) {
    const LinearMap m = fit_flu_to_ili(flu_counts, ili_activity, precovid_end);
    WeeklySeries out = flu_counts;
    for (auto& v : out.values) v = m.slope * v + m.intercept;
    return out;
}

WeeklySeries excess_ili(const WeeklySeries& observed, const WeeklySeries& counterfactual) {
    if (observed.weeks != counterfactual.weeks) {
        throw DataError("observed and counterfactual ILI series cover different weeks");
    }
    WeeklySeries out = observed;
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = observed.values[i] - counterfactual.values[i];
    return out;
}

IliTable read_ili_csv(const std::filesystem::path& path) {
    const auto t = csv::read_table(path, {"week_start", "activity_pct", "ili_visits"});
    IliTable out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        try {
            const Date w = Date::parse(t.rows[r][0]);
            if (!out.activity_pct.weeks.empty() && w <= out.activity_pct.weeks.back()) {
                throw DataError("weeks must be strictly increasing");
            }
            out.activity_pct.weeks.push_back(w);
            out.activity_pct.values.push_back(csv::parse_number(t.rows[r][1]));
            out.ili_visits.weeks.push_back(w);
            out.ili_visits.values.push_back(csv::parse_number(t.rows[r][2]));
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(t.line_numbers[r]) + ": " + e.what());
        }
    }
    return out;
}

std::vector<VirologyRecord> read_virology_csv(const std::filesystem::path& path, const IliTable& ili) {
    const auto t = csv::read_table(path, {"week_start", "flu_positive", "total_specimens"});
    std::map<Date, double> visits;
    for (std::size_t i = 0; i < ili.ili_visits.size(); ++i) visits[ili.ili_visits.weeks[i]] = ili.ili_visits.values[i];
    std::vector<VirologyRecord> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        try {
            VirologyRecord rec;
            rec.week = Date::parse(t.rows[r][0]);
            rec.flu_positive = csv::parse_number(t.rows[r][1]);
            rec.total_specimens = csv::parse_number(t.rows[r][2]);
            const auto it = visits.find(rec.week);
            if (it == visits.end()) continue;
            rec.ili_visits = it->second;
            out.push_back(rec);
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(t.line_numbers[r]) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace ewarn::ili
