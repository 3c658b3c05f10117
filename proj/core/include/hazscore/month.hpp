#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace hazscore {

/// Calendar month stored as a running index (year * 12 + month - 1).
class Month {
public:
    constexpr Month() = default;
    constexpr Month(int year, int month) : index_(year * 12 + (month - 1)) {}

    static constexpr Month from_index(std::int32_t index) {
        Month m;
        m.index_ = index;
        return m;
    }

    /// Accepts YYYY-MM, YYYY-MM-DD, YYYYMM and M/D/YYYY. Throws std::invalid_argument.
    static Month parse(std::string_view text);

    constexpr std::int32_t index() const { return index_; }
    constexpr int year() const { return floor_div(index_, 12); }
    constexpr int month() const { return index_ - floor_div(index_, 12) * 12 + 1; }
    constexpr int quarter() const { return (month() - 1) / 3 + 1; }

    /// First month of the calendar quarter containing this month.
    constexpr Month quarter_start() const { return Month(year(), (quarter() - 1) * 3 + 1); }

    std::string to_string() const;

    constexpr Month operator+(int months) const { return from_index(index_ + months); }
    constexpr Month operator-(int months) const { return from_index(index_ - months); }
    constexpr int operator-(Month other) const { return index_ - other.index_; }
    constexpr Month& operator++() {
        ++index_;
        return *this;
    }

    constexpr auto operator<=>(const Month&) const = default;

private:
    static constexpr int floor_div(int a, int b) { return (a >= 0) ? a / b : -((-a + b - 1) / b); }

    std::int32_t index_ = 0;
};

}  // namespace hazscore

template <>
struct std::hash<hazscore::Month> {
    std::size_t operator()(const hazscore::Month& m) const noexcept { return std::hash<std::int32_t>{}(m.index()); }
};
