#include <random>

#include "doctest.h"
#include "ewarn/errors.hpp"
#include "ewarn/ts_core.hpp"
#include "test_util.hpp"

using namespace ewarn;
using test::series;
using doctest::Approx;

namespace {
void check_values(const std::vector<double>& got, const std::vector<double>& want, double eps = 1e-12) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == Approx(want[i]).epsilon(eps));
}
}  // namespace

TEST_CASE("shift_for_delay") {
    auto ili = series({1, 2, 3}, Date{2020, 3, 11});
    ili.delay_days = 10;
    const auto out = shift_for_delay(ili);
    CHECK(out.start_date == Date{2020, 3, 1});
    CHECK(out.values == ili.values);
    CHECK(out.delay_days == 0);

    auto utd = series({1}, Date{2020, 4, 4});
    utd.delay_days = 3;
    CHECK(shift_for_delay(utd).start_date == Date{2020, 4, 1});

    const auto zero = series({4, 5});
    CHECK(shift_for_delay(zero).start_date == zero.start_date);
    CHECK(shift_for_delay(shift_for_delay(ili)).start_date == out.start_date);
}

TEST_CASE("minmax_normalize") {
    check_values(minmax_normalize(series({2, 4, 6})).values, {0, 0.5, 1});
    check_values(minmax_normalize(series({0, 1})).values, {0, 1});
    CHECK_THROWS_AS(minmax_normalize(series({5, 5, 5})), DataError);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(20);
        for (auto& x : v) x = u(rng);
        const double a = std::abs(u(rng)) + 0.1;
        const double b = u(rng);
        std::vector<double> t(v);
        for (auto& x : t) x = a * x + b;
        check_values(minmax_normalize(series(t)).values, minmax_normalize(series(v)).values, 1e-9);
    }
}

TEST_CASE("moving_average") {
    check_values(moving_average(series({1, 2, 3, 4}), 2).values, {1, 1.5, 2.5, 3.5});
    check_values(moving_average(series({0, 0, 6}), 3).values, {0, 0, 2});
    const auto s = series({3, 1, 4, 1, 5});
    CHECK(moving_average(s, 1).values == s.values);
    check_values(moving_average(series({7, 7, 7, 7}), 3).values, {7, 7, 7, 7});
    CHECK_THROWS_AS(moving_average(s, 6), DataError);
    CHECK_THROWS_AS(moving_average(s, 0), ConfigError);
}

TEST_CASE("aggregate_weighted") {
    const std::vector<DailySeries> two{series({1, 1}), series({3, 3})};
    check_values(aggregate_weighted(two, std::vector<double>{1, 1}).values, {2, 2});
    check_values(aggregate_weighted(two, std::vector<double>{3, 1}).values, {1.5, 1.5});
    check_values(aggregate_weighted(two, std::vector<double>{30, 10}).values, {1.5, 1.5});
    const std::vector<DailySeries> one{series({4, 9})};
    check_values(aggregate_weighted(one, std::vector<double>{0.3}).values, {4, 9});

    const std::vector<DailySeries> shifted{series({1, 1}), series({3, 3}, Date{2020, 3, 2})};
    CHECK_THROWS_AS(aggregate_weighted(shifted, std::vector<double>{1, 1}), DataError);
    CHECK_THROWS_AS(aggregate_weighted(two, std::vector<double>{0, 0}), ConfigError);
    CHECK_THROWS_AS(aggregate_weighted(two, std::vector<double>{1}), ConfigError);
}

TEST_CASE("truncate_excess") {
    check_values(truncate_excess(series({5, 2}), series({3, 4})).values, {2, 0});
    check_values(truncate_excess(series({3, 4}), series({3, 4})).values, {0, 0});
    check_values(truncate_excess(series({0, 0}), series({1, 1})).values, {0, 0});
    CHECK_THROWS_AS(truncate_excess(series({1, 2}), series({1})), DataError);
}

TEST_CASE("rebase_min_one") {
    check_values(rebase_min_one(std::vector<double>{0, 3, 7}), {1, 4, 8});
    check_values(rebase_min_one(std::vector<double>{1, 2}), {1, 2});
    check_values(rebase_min_one(std::vector<double>{-5, -5}), {1, 1});

    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0, 100);
    for (int trial = 0; trial < 200; ++trial) {
        Window w;
        for (int i = 0; i < 14; ++i) w.values.push_back(n(rng));
        const auto r = rebase_min_one(w);
        CHECK(*std::min_element(r.values.begin(), r.values.end()) == 1.0);
        for (std::size_t i = 1; i < 14; ++i) {
            CHECK(r.values[i] - r.values[0] == Approx(w.values[i] - w.values[0]).epsilon(1e-9));
        }
    }
}

TEST_CASE("windows and truncation") {
    const auto s = series({1, 2, 3, 4, 5});
    const auto w = window_at(s, 4, 3);
    CHECK(w.values == std::vector<double>{3, 4, 5});
    CHECK(w.end_date == Date{2020, 3, 5});
    CHECK_THROWS_AS(window_at(s, 1, 3), DataError);
    CHECK(truncate_after(s, Date{2020, 3, 2}).values == std::vector<double>{1, 2});
    CHECK(truncate_after(s, Date{2020, 2, 1}).empty());
    CHECK(truncate_after(s, Date{2021, 1, 1}).size() == 5);
}

TEST_CASE("ingestion fills interior gaps and drops edge gaps") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto s = densify_daily({{Date{2020, 1, 5}, 4.0},
                                  {Date{2020, 1, 1}, nan},
                                  {Date{2020, 1, 2}, 1.0},
                                  {Date{2020, 1, 3}, nan},
                                  {Date{2020, 1, 6}, nan}});
    CHECK(s.start_date == Date{2020, 1, 2});
    check_values(s.values, {1, 2, 3, 4});
    CHECK_THROWS_AS(densify_daily({{Date{2020, 1, 1}, 1.0}, {Date{2020, 1, 1}, 2.0}}), DataError);
    CHECK_THROWS_AS(densify_daily({{Date{2020, 1, 1}, nan}}), DataError);

    const auto w = expand_weekly({{Date{2020, 1, 5}, 2.0}, {Date{2020, 1, 12}, 3.0}});
    CHECK(w.start_date == Date{2020, 1, 5});
    REQUIRE(w.size() == 14);
    CHECK(w.values[6] == 2.0);
    CHECK(w.values[7] == 3.0);
    CHECK_THROWS_AS(expand_weekly({{Date{2020, 1, 5}, 2.0}, {Date{2020, 1, 8}, 3.0}}), DataError);
}

TEST_CASE("series csv round trip") {
    test::TempDir tmp("ts");
    const auto s = series({1.25, 2.5, 1.0 / 3.0});
    write_series_csv(tmp / "s.csv", s);
    const auto back = densify_daily(read_observation_csv(tmp / "s.csv"));
    CHECK(back.start_date == s.start_date);
    CHECK(back.values == s.values);
    test::write_file(tmp / "bad.csv", "date,value\n2020-01-01,x\n");
    CHECK_THROWS_AS(read_observation_csv(tmp / "bad.csv"), DataError);
}
