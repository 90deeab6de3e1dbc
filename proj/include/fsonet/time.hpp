#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace fsonet {

// UTC is treated as a uniform time scale; leap seconds are ignored.
using UtcTime = std::chrono::sys_seconds;
using PreciseTime = std::chrono::sys_time<std::chrono::duration<double>>;
using Seconds = std::chrono::seconds;

struct TimeWindow {
    UtcTime start;
    UtcTime end;

    Seconds length() const { return end - start; }
    bool contains(UtcTime t) const { return start <= t && t <= end; }
};

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string to_iso8601(UtcTime t);

/// Accepts `YYYY-MM-DDTHH:MM:SS` with optional trailing `Z`, or a bare date
/// `YYYY-MM-DD` (midnight). Throws Error(FormatError) otherwise.
UtcTime parse_iso8601(std::string_view text);

struct YearMonth {
    int year = 1970;
    unsigned month = 1;

    auto operator<=>(const YearMonth&) const = default;

    /// `YYYY-MM`
    std::string to_string() const;
    YearMonth next() const;
    UtcTime first_instant() const;
};

YearMonth year_month_of(UtcTime t);

double julian_date(PreciseTime t);
inline double julian_date(UtcTime t) { return julian_date(PreciseTime(t)); }

inline double seconds_between(PreciseTime from, PreciseTime to) {
    return std::chrono::duration<double>(to - from).count();
}

}  // namespace fsonet
