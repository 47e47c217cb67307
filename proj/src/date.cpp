#include "ewarn/date.hpp"

#include <charconv>
#include <cstdio>

#include "ewarn/errors.hpp"

namespace ewarn {

namespace {

int parse_field(std::string_view s, std::string_view whole) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError("malformed date '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace

Date Date::parse(std::string_view iso) {
    while (!iso.empty() && (iso.front() == ' ' || iso.front() == '"')) iso.remove_prefix(1);
    while (!iso.empty() && (iso.back() == ' ' || iso.back() == '"' || iso.back() == '\r')) {
        iso.remove_suffix(1);
    }
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw DataError("malformed date '" + std::string(iso) + "', expected YYYY-MM-DD");
    }
    const int y = parse_field(iso.substr(0, 4), iso);
    const int m = parse_field(iso.substr(5, 2), iso);
    const int d = parse_field(iso.substr(8, 2), iso);
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                          std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) throw DataError("invalid calendar date '" + std::string(iso) + "'");
    return Date{std::chrono::sys_days{ymd}};
}

std::string Date::iso() const {
    const std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

}  // namespace ewarn
