#include "ewarn/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ewarn/csv.hpp"
#include "ewarn/errors.hpp"
#include "json.hpp"

namespace ewarn::report {

using ojson = nlohmann::ordered_json;

std::string pvalues_csv(const PValueSeries& pv) {
    std::ostringstream out;
    out << "date,p\n";
    for (std::size_t i = 0; i < pv.dates.size(); ++i) {
        out << pv.dates[i].iso() << ',' << csv::format_double(pv.p[i]) << '\n';
    }
    return out.str();
}

PValueSeries read_pvalues_csv(const std::filesystem::path& path, SeriesRef ref, Direction direction) {
    const auto t = csv::read_table(path, {"date", "p"});
    PValueSeries pv;
    pv.series_ref = std::move(ref);
    pv.direction = direction;
    for (const auto& row : t.rows) {
        pv.dates.push_back(Date::parse(row[0]));
        pv.p.push_back(csv::parse_number(row[1]));
    }
    return pv;
}

std::string events_json(std::span<const TrendEvent> events) {
    ojson arr = ojson::array();
    for (const auto& e : events) {
        arr.push_back({{"location", e.series_ref.location},
                       {"proxy_id", e.series_ref.proxy_id},
                       {"direction", std::string(to_string(e.direction))},
                       {"event_date", e.event_date.iso()},
                       {"p_at_event", e.p_at_event}});
    }
    return arr.dump(2) + "\n";
}

std::string posterior_json(const TimeToEventPosterior& post, const std::string& location) {
    ojson j;
    j["location"] = location;
    j["as_of"] = post.as_of.iso();
    j["direction"] = std::string(to_string(post.direction));
    j["support"] = post.support;
    j["pmf"] = post.pmf;
    return j.dump(2) + "\n";
}

std::string posterior_csv(const TimeToEventPosterior& post) {
    std::ostringstream out;
    out << "days_ahead,date,p\n";
    for (std::size_t i = 0; i < post.pmf.size(); ++i) {
        out << post.support[i] << ',' << (post.as_of + post.support[i]).iso() << ','
            << csv::format_double(post.pmf[i]) << '\n';
    }
    return out.str();
}

std::string leadlag_csv(std::span<const LeadLagSummary> summaries) {
    std::ostringstream out;
    out << "input,reference,state,diff_days\n";
    for (const auto& s : summaries) {
        for (const auto& [state, diff] : s.diffs) {
            out << s.input_proxy << ',' << s.reference_proxy << ',' << state << ',' << diff << '\n';
        }
    }
    return out.str();
}

std::string leadlag_json(std::span<const LeadLagSummary> summaries) {
    ojson arr = ojson::array();
    for (const auto& s : summaries) {
        arr.push_back({{"input", s.input_proxy},
                       {"reference", s.reference_proxy},
                       {"n_states", s.diffs.size()},
                       {"median", s.median},
                       {"q1", s.q1},
                       {"q3", s.q3}});
    }
    return arr.dump(2) + "\n";
}

std::string tally_json(const std::map<std::string, double>& tally, Direction direction) {
    ojson j;
    j["direction"] = std::string(to_string(direction));
    j["first_activation"] = ojson::object();
    for (const auto& [proxy, count] : tally) j["first_activation"][proxy] = count;
    return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = csv::open_output(path);
    out << text;
}

}  // namespace ewarn::report

namespace ewarn::svg {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::vector<double> display_values(const DailySeries& s, int smoothing_days) {
    if (s.empty()) return {};
    try {
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(smoothing_days), s.size());
        return minmax_normalize(moving_average(s, k)).values;
    } catch (const DataError&) {
        return std::vector<double>(s.size(), 0.0);  // constant series
    }
}

const char* band_colour(double p, double threshold, Direction d) {
    if (p < threshold) return d == Direction::uptrend ? "#d62728" : "#2ca02c";
    if (p < 0.5) return "#ff7f0e";
    return "#1f77b4";
}

struct Axis {
    Date first;
    long span_days;
    double x0, width;
    double x(Date d) const {
        return x0 + width * static_cast<double>(d - first) / static_cast<double>(std::max(span_days, 1L));
    }
    double day_width() const { return width / static_cast<double>(std::max(span_days, 1L)); }
};

void month_ticks(std::ostringstream& o, const Axis& ax, double top, double bottom) {
    const Date last = ax.first + ax.span_days;
    for (Date d = ax.first; d <= last; d += 1) {
        const auto ymd = std::chrono::year_month_day{d.sys()};
        if (unsigned(ymd.day()) != 1) continue;
        o << "<line x1=\"" << num(ax.x(d)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(ax.x(d)) << "\" y2=\""
          << num(bottom) << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << num(ax.x(d) + 2) << "\" y=\"" << num(bottom + 12)
          << "\" font-size=\"10\" fill=\"#555\">" << d.iso().substr(0, 7) << "</text>\n";
    }
}

}  // namespace

std::string detection_plot(const std::string& location, std::span<const DetectionPanel> panels,
                           int smoothing_days, double threshold) {
    constexpr double kLeft = 130, kWidth = 740, kRow = 74, kLine = 44, kBand = 8, kTop = 30;
    Date first{2100, 1, 1}, last{1900, 1, 1};
    for (const auto& p : panels) {
        if (p.series.empty()) continue;
        first = std::min(first, p.series.start_date);
        last = std::max(last, p.series.end_date());
    }
    if (last < first) last = first;
    const Axis ax{first, last - first, kLeft, kWidth};
    const double height = kTop + kRow * static_cast<double>(panels.size()) + 30;

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"" << num(height)
      << "\" font-family=\"sans-serif\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"10\" y=\"20\" font-size=\"14\">" << escape(location)
      << ": trend detection (normalized, smoothed)</text>\n";
    month_ticks(o, ax, kTop, height - 30);

    double y0 = kTop;
    for (const auto& p : panels) {
        o << "<text x=\"8\" y=\"" << num(y0 + kLine / 2) << "\" font-size=\"11\">" << escape(p.series.proxy_id)
          << "</text>\n";
        const auto vals = display_values(p.series, smoothing_days);
        o << "<polyline fill=\"none\" stroke=\"#333\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < vals.size(); ++i) {
            o << num(ax.x(p.series.date_at(i))) << ',' << num(y0 + kLine * (1.0 - vals[i])) << ' ';
        }
        o << "\"/>\n";
        const double dw = ax.day_width() + 0.05;
        auto band = [&](const PValueSeries* pv, double by) {
            if (!pv) return;
            for (std::size_t i = 0; i < pv->dates.size(); ++i) {
                o << "<rect x=\"" << num(ax.x(pv->dates[i]) - dw / 2) << "\" y=\"" << num(by) << "\" width=\""
                  << num(dw) << "\" height=\"" << num(kBand) << "\" fill=\""
                  << band_colour(pv->p[i], threshold, pv->direction) << "\"/>\n";
            }
        };
        band(p.up, y0 + kLine + 2);
        band(p.down, y0 + kLine + 2 + kBand + 1);
        for (const auto& e : p.events) {
            const double x = ax.x(e.event_date);
            if (e.direction == Direction::uptrend) {
                const double ty = y0 + kLine + 2;
                o << "<polygon points=\"" << num(x - 5) << ',' << num(ty) << ' ' << num(x + 5) << ',' << num(ty) << ' '
                  << num(x) << ',' << num(ty - 9) << "\" fill=\"#d62728\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
            } else {
                const double ty = y0 + kLine + 2 + 2 * kBand + 1;
                o << "<polygon points=\"" << num(x - 5) << ',' << num(ty) << ' ' << num(x + 5) << ',' << num(ty) << ' '
                  << num(x) << ',' << num(ty + 9) << "\" fill=\"#2ca02c\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
            }
        }
        y0 += kRow;
    }
    o << "</svg>\n";
    return o.str();
}

std::string posterior_plot(const std::string& location, const TimeToEventPosterior& post, const DailySeries* gold,
                           std::span<const TrendEvent> events) {
    constexpr double kLeft = 60, kWidth = 800, kTop = 40, kHeight = 260;
    Date first = post.as_of - 60;
    Date last = post.as_of + static_cast<long>(post.pmf.size());
    if (gold && !gold->empty()) {
        first = std::min(first, gold->start_date);
        last = std::max(last, gold->end_date());
    }
    for (const auto& e : events) first = std::min(first, e.event_date);
    const Axis ax{first, last - first, kLeft, kWidth};
    const double bottom = kTop + kHeight;

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"" << num(bottom + 40)
      << "\" font-family=\"sans-serif\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"10\" y=\"20\" font-size=\"14\">" << escape(location) << ": " << to_string(post.direction)
      << " time-to-event posterior as of " << post.as_of.iso() << "</text>\n";
    month_ticks(o, ax, kTop, bottom);

    if (gold && !gold->empty()) {
        const auto vals = display_values(*gold, 7);
        o << "<polyline fill=\"none\" stroke=\"#999\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < vals.size(); ++i) {
            o << num(ax.x(gold->date_at(i))) << ',' << num(bottom - kHeight * vals[i]) << ' ';
        }
        o << "\"/>\n";
    }
    const double peak = *std::max_element(post.pmf.begin(), post.pmf.end());
    const double dw = ax.day_width();
    for (std::size_t i = 0; i < post.pmf.size(); ++i) {
        const double h = peak > 0 ? kHeight * 0.9 * post.pmf[i] / peak : 0.0;
        o << "<rect x=\"" << num(ax.x(post.as_of + post.support[i]) - dw / 2) << "\" y=\"" << num(bottom - h)
          << "\" width=\"" << num(dw) << "\" height=\"" << num(h) << "\" fill=\"#d62728\" fill-opacity=\"0.6\"/>\n";
    }
    for (const auto& e : events) {
        const double x = ax.x(e.event_date);
        o << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x) << "\" y2=\"" << num(bottom)
          << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
        o << "<text x=\"" << num(x + 2) << "\" y=\"" << num(kTop + 10) << "\" font-size=\"9\">"
          << escape(e.series_ref.proxy_id) << "</text>\n";
    }
    const double xa = ax.x(post.as_of);
    o << "<line x1=\"" << num(xa) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(xa) << "\" y2=\"" << num(bottom)
      << "\" stroke=\"black\" stroke-dasharray=\"4,3\"/>\n";
    o << "</svg>\n";
    return o.str();
}

}  // namespace ewarn::svg
