#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace ewarn {

/// Calendar date with day resolution. Thin wrapper over std::chrono::sys_days
/// so that arithmetic is in whole days and ordering is total.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days d) : days_(d) {}
    constexpr Date(int y, unsigned m, unsigned d)
        : days_(std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                            std::chrono::day{d}}) {}

    /// Parses YYYY-MM-DD. Throws DataError on malformed or invalid dates.
    static Date parse(std::string_view iso);

    std::string iso() const;
    constexpr std::chrono::sys_days sys() const { return days_; }
    constexpr long serial() const { return days_.time_since_epoch().count(); }

    constexpr Date operator+(long n) const { return Date{days_ + std::chrono::days{n}}; }
    constexpr Date operator-(long n) const { return Date{days_ - std::chrono::days{n}}; }
    constexpr long operator-(Date other) const { return (days_ - other.days_).count(); }
    Date& operator+=(long n) {
        days_ += std::chrono::days{n};
        return *this;
    }

    constexpr auto operator<=>(const Date&) const = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace ewarn
