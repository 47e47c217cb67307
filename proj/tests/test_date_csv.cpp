#include <cmath>

#include "doctest.h"
#include "ewarn/csv.hpp"
#include "ewarn/date.hpp"
#include "ewarn/errors.hpp"
#include "test_util.hpp"

using namespace ewarn;

TEST_CASE("date parsing and arithmetic") {
    const Date d = Date::parse("2020-03-11");
    CHECK(d.iso() == "2020-03-11");
    CHECK((d - 10).iso() == "2020-03-01");
    CHECK((Date{2020, 2, 28} + 1).iso() == "2020-02-29");
    CHECK((Date{2021, 1, 1} - Date{2020, 1, 1}) == 366);
    CHECK(Date::parse(" \"2020-01-05\" ") == Date{2020, 1, 5});
    CHECK_THROWS_AS(Date::parse("2020-02-30"), DataError);
    CHECK_THROWS_AS(Date::parse("2020/02/01"), DataError);
    CHECK_THROWS_AS(Date::parse(""), DataError);
}

TEST_CASE("csv line splitting honours quotes and trims") {
    const auto f = csv::split_line(" a , \"b,c\" ,d\r");
    REQUIRE(f.size() == 3);
    CHECK(f[0] == "a");
    CHECK(f[1] == "b,c");
    CHECK(f[2] == "d");
}

TEST_CASE("numbers") {
    CHECK(csv::parse_number("1.5") == 1.5);
    CHECK(csv::parse_number("-2e3") == -2000.0);
    CHECK(std::isnan(csv::parse_number("")));
    CHECK(std::isnan(csv::parse_number("NA")));
    CHECK(std::isnan(csv::parse_number("nan")));
    CHECK_THROWS_AS(csv::parse_number("abc"), DataError);
    CHECK_THROWS_AS(csv::parse_number("1.5x"), DataError);
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123}) {
        CHECK(csv::parse_number(csv::format_double(v)) == v);
    }
}

TEST_CASE("table reading") {
    test::TempDir tmp("csv");
    test::write_file(tmp / "ok.csv", "\xEF\xBB\xBFvalue,date\n3,2020-01-01\n\n4,2020-01-02\n");
    const auto t = csv::read_table(tmp / "ok.csv", {"date", "value"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1][0] == "2020-01-02");
    CHECK(t.rows[1][1] == "4");
    CHECK(t.line_numbers[1] == 4);

    test::write_file(tmp / "short.csv", "date,value\n2020-01-01\n");
    CHECK_THROWS_AS(csv::read_table(tmp / "short.csv", {"date", "value"}), DataError);
    test::write_file(tmp / "nohdr.csv", "day,value\n");
    CHECK_THROWS_AS(csv::read_table(tmp / "nohdr.csv", {"date", "value"}), DataError);
    CHECK_THROWS_AS(csv::read_table(tmp / "missing.csv", {"date"}), DataError);
}
