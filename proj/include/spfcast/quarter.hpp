#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace spfcast {

/// Calendar quarter, the time unit of every series in the engine.
///
/// Quarters form a totally ordered sequence with integer arithmetic:
/// 1995Q3 + 2 == 1996Q1. Horizon-h forecasts issued at origin t target
/// t + h - 1, so horizon 1 is a nowcast of the origin quarter itself.
struct Quarter {
    int year = 0;
    int q = 1;  // 1..4

    constexpr Quarter() = default;
    Quarter(int year_, int q_);

    /// Quarters since 0000Q1; the canonical ordering key.
    constexpr int index() const noexcept { return year * 4 + (q - 1); }
    static Quarter from_index(int idx);

    Quarter operator+(int n) const { return from_index(index() + n); }
    Quarter operator-(int n) const { return from_index(index() - n); }
    /// Signed distance in quarters.
    int operator-(Quarter other) const noexcept { return index() - other.index(); }
    Quarter& operator+=(int n) { return *this = *this + n; }

    friend constexpr bool operator==(Quarter a, Quarter b) noexcept {
        return a.index() == b.index();
    }
    friend constexpr auto operator<=>(Quarter a, Quarter b) noexcept {
        return a.index() <=> b.index();
    }

    /// "1995Q3"
    std::string str() const;
    /// Accepts "1995Q3" and "1995q3". Throws ParseError otherwise.
    static Quarter parse(std::string_view text);

    /// Quarter containing a calendar month (1..12).
    static Quarter of_month(int year, int month);
};

/// Months since 0000-01; key for monthly CPI observations.
int month_index(int year, int month);
Quarter quarter_of_month_index(int midx);
std::string month_index_str(int midx);                 // "1994-07"
int parse_month(std::string_view text);                // "1994-07" -> index

}  // namespace spfcast
