#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ewarn/errors.hpp"
#include "ewarn/time_to_event.hpp"

using namespace ewarn;
using doctest::Approx;

namespace {

LagModel model(std::string id, std::vector<double> lags) {
    LagModel m{std::move(id), std::move(lags), 0.0};
    m.bandwidth = scott_bandwidth(m.lag_samples);
    return m;
}

// Direct summed-kernel evaluation of one expert on the 180-day grid.
std::vector<double> direct_single_expert(const std::vector<double>& lags, double h, double dx) {
    std::vector<double> w(180);
    double total = 0;
    for (int y = 0; y < 180; ++y) {
        double f = 0;
        for (double l : lags) {
            const double z = (y + dx - l) / h;
            f += std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi);
        }
        w[y] = f / (lags.size() * h) + 1e-6;
        total += w[y];
    }
    for (auto& v : w) v /= total;
    return w;
}

double pmf_sum(const TimeToEventPosterior& p) {
    double s = 0;
    for (double v : p.pmf) {
        CHECK(v >= 0.0);
        s += v;
    }
    return s;
}

}  // namespace

TEST_CASE("scott bandwidth") {
    std::vector<double> s32;
    // 32 samples with sample sd exactly 2: ±a with a chosen so that (n-1) s² = n a².
    const double a = 2.0 * std::sqrt(31.0 / 32.0);
    for (int i = 0; i < 16; ++i) {
        s32.push_back(a);
        s32.push_back(-a);
    }
    CHECK(scott_bandwidth(s32) == Approx(1.0).epsilon(1e-12));
    CHECK(scott_bandwidth(std::vector<double>{10, 10, 10}) == 0.5);
    std::vector<double> s1024;
    const double b = std::sqrt(1023.0 / 1024.0);
    for (int i = 0; i < 512; ++i) {
        s1024.push_back(b);
        s1024.push_back(-b);
    }
    CHECK(scott_bandwidth(s1024, 0.1) == Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(scott_bandwidth(std::vector<double>{1}), DataError);
}

TEST_CASE("kde") {
    LagModel m{"p", {0}, 1};
    CHECK(kde_pdf(m, 0) == Approx(1 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-14));
    CHECK(kde_pdf(m, 0) == Approx(0.39894).epsilon(1e-5));
    LagModel two{"p", {0, 2}, 1};
    CHECK(kde_pdf(two, 1) == Approx(std::exp(-0.5) / std::sqrt(2 * std::numbers::pi)).epsilon(1e-14));
    CHECK(kde_pdf(two, 1) == Approx(0.24197).epsilon(1e-4));
    LagModel sym{"p", {-1, 1}, 0.7};
    for (double x : {0.3, 1.7, 5.0}) CHECK(kde_pdf(sym, x) == kde_pdf(sym, -x));
}

TEST_CASE("pool_lags") {
    std::map<std::string, StateEvents> ev;
    ev["A"] = {{{"tw", Date{2020, 3, 1}}}, Date{2020, 3, 9}};
    ev["B"] = {{{"tw", Date{2020, 3, 1}}}, Date{2020, 3, 11}};
    ev["C"] = {{{"tw", Date{2020, 3, 1}}}, Date{2020, 3, 13}};
    ev["D"] = {{{"tw", Date{2020, 3, 1}}}, std::nullopt};
    ev["E"] = {{}, Date{2020, 3, 13}};
    const auto m = pool_lags(ev, "tw");
    CHECK(m.lag_samples == std::vector<double>{8, 10, 12});
    CHECK(m.bandwidth == Approx(2.0 * std::pow(3.0, -0.2)).epsilon(1e-12));
    const auto loo = pool_lags(ev, "tw", 0.5, {"A", "B"});
    CHECK(loo.lag_samples == std::vector<double>{12});
    CHECK(loo.bandwidth == 0.5);
    CHECK_THROWS_AS(pool_lags(ev, "google"), DataError);
}

TEST_CASE("posterior: eventless experts give the uniform prior") {
    std::map<std::string, LagModel> models{{"tw", model("tw", {8, 10, 12})}, {"gt", model("gt", {3, 5})}};
    std::map<std::string, ExpertInput> experts{{"tw", {}}, {"gt", {}}};
    const auto p = posterior_time_to_event(experts, models, Date{2020, 3, 1});
    REQUIRE(p.pmf.size() == 180);
    REQUIRE(p.support.size() == 180);
    CHECK(p.support.front() == 0);
    CHECK(p.support.back() == 179);
    for (double v : p.pmf) CHECK(std::abs(v - 1.0 / 180) < 1e-12);
    CHECK_THROWS_AS(posterior_time_to_event(experts, {}, Date{2020, 3, 1}), ConfigError);
}

TEST_CASE("posterior: single expert matches direct evaluation") {
    const std::vector<double> lags{8, 10, 12};
    std::map<std::string, LagModel> models{{"tw", model("tw", lags)}};
    const auto p = posterior_time_to_event({{"tw", {4.0, SeriesKind::proxy}}}, models, Date{2020, 3, 1});
    CHECK(p.mode() == 6);
    CHECK(pmf_sum(p) == Approx(1.0).epsilon(1e-9));
    const auto direct = direct_single_expert(lags, models["tw"].bandwidth, 4.0);
    for (int y = 0; y < 180; ++y) CHECK(std::abs(p.pmf[y] - direct[y]) < 1e-12);

    const auto later = posterior_time_to_event({{"tw", {5.0, SeriesKind::proxy}}}, models, Date{2020, 3, 2});
    CHECK(later.mode() == 5);
    const auto late = posterior_time_to_event({{"tw", {30.0, SeriesKind::proxy}}}, models, Date{2020, 3, 2});
    CHECK(late.mode() == 0);
}

TEST_CASE("posterior: consistent experts sharpen and order does not matter") {
    std::map<std::string, LagModel> models{{"a", model("a", {8, 10, 12, 9, 11})}, {"b", model("b", {18, 20, 22, 19, 21})}};
    const auto pa = posterior_time_to_event({{"a", {4.0, SeriesKind::proxy}}}, models, Date{2020, 3, 1});
    const auto pb = posterior_time_to_event({{"b", {14.0, SeriesKind::proxy}}}, models, Date{2020, 3, 1});
    const auto both = posterior_time_to_event({{"a", {4.0, SeriesKind::proxy}}, {"b", {14.0, SeriesKind::proxy}}},
                                              models, Date{2020, 3, 1});
    CHECK(both.mode() == 6);
    CHECK(both.variance() <= pa.variance());
    CHECK(both.variance() <= pb.variance());
    CHECK(both.mass_between(1, 11) > 0.99);
    CHECK(both.mass_between(0, 179) == Approx(1.0).epsilon(1e-9));

    // Swap expert keys so the multiplication order changes.
    std::map<std::string, LagModel> swapped{{"z", models["a"]}, {"b", models["b"]}};
    swapped["z"].proxy_id = "z";
    const auto again = posterior_time_to_event({{"z", {4.0, SeriesKind::proxy}}, {"b", {14.0, SeriesKind::proxy}}},
                                               swapped, Date{2020, 3, 1});
    for (int y = 0; y < 180; ++y) CHECK(again.pmf[y] == Approx(both.pmf[y]).epsilon(1e-12));
}

TEST_CASE("posterior: mobility is ignored for uptrends only") {
    std::map<std::string, LagModel> models{{"a", model("a", {8, 10, 12})}, {"mob", model("mob", {30, 31})}};
    const auto without = posterior_time_to_event({{"a", {4.0, SeriesKind::proxy}}}, models, Date{2020, 3, 1});
    const auto with = posterior_time_to_event(
        {{"a", {4.0, SeriesKind::proxy}}, {"mob", {2.0, SeriesKind::mobility}}}, models, Date{2020, 3, 1});
    CHECK(with.pmf == without.pmf);
    const auto down = posterior_time_to_event({{"a", {4.0, SeriesKind::proxy}}, {"mob", {2.0, SeriesKind::mobility}}},
                                              models, Date{2020, 3, 1}, Direction::downtrend);
    CHECK(down.pmf != without.pmf);
}
