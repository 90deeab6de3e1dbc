#include "fsonet/time.hpp"

#include "fsonet/error.hpp"

#include <charconv>

#include <fmt/format.h>

namespace fsonet {

namespace {

int parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    int value = 0;
    if (pos + len > text.size()) {
        throw Error(ErrorCode::FormatError, "truncated timestamp '" + std::string(whole) + "'");
    }
    auto first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc() || ptr != first + len) {
        throw Error(ErrorCode::FormatError, "malformed timestamp '" + std::string(whole) + "'");
    }
    return value;
}

void expect_char(std::string_view text, std::size_t pos, char c, std::string_view whole) {
    if (pos >= text.size() || text[pos] != c) {
        throw Error(ErrorCode::FormatError, "malformed timestamp '" + std::string(whole) + "'");
    }
}

}  // namespace

std::string to_iso8601(UtcTime t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", int(ymd.year()), unsigned(ymd.month()),
                       unsigned(ymd.day()), hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

UtcTime parse_iso8601(std::string_view text) {
    using namespace std::chrono;
    const auto whole = text;
    if (!text.empty() && (text.back() == 'Z' || text.back() == 'z')) {
        text.remove_suffix(1);
    }
    const int y = parse_fixed_int(text, 0, 4, whole);
    expect_char(text, 4, '-', whole);
    const int mo = parse_fixed_int(text, 5, 2, whole);
    expect_char(text, 7, '-', whole);
    const int d = parse_fixed_int(text, 8, 2, whole);
    int hh = 0, mm = 0, ss = 0;
    if (text.size() > 10) {
        if (text[10] != 'T' && text[10] != ' ') {
            throw Error(ErrorCode::FormatError, "malformed timestamp '" + std::string(whole) + "'");
        }
        hh = parse_fixed_int(text, 11, 2, whole);
        expect_char(text, 13, ':', whole);
        mm = parse_fixed_int(text, 14, 2, whole);
        expect_char(text, 16, ':', whole);
        ss = parse_fixed_int(text, 17, 2, whole);
        if (text.size() != 19) {
            throw Error(ErrorCode::FormatError, "trailing characters in timestamp '" + std::string(whole) + "'");
        }
    } else if (text.size() != 10) {
        throw Error(ErrorCode::FormatError, "malformed timestamp '" + std::string(whole) + "'");
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59) {
        throw Error(ErrorCode::FormatError, "invalid calendar value in '" + std::string(whole) + "'");
    }
    return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string YearMonth::to_string() const { return fmt::format("{:04d}-{:02d}", year, month); }

YearMonth YearMonth::next() const {
    return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
}

UtcTime YearMonth::first_instant() const {
    using namespace std::chrono;
    return sys_days{std::chrono::year{year} / std::chrono::month{month} / 1};
}

YearMonth year_month_of(UtcTime t) {
    using namespace std::chrono;
    const year_month_day ymd{floor<days>(t)};
    return YearMonth{int(ymd.year()), unsigned(ymd.month())};
}

double julian_date(PreciseTime t) {
    // 1970-01-01T00:00:00Z is JD 2440587.5
    return 2440587.5 + t.time_since_epoch().count() / 86400.0;
}

}  // namespace fsonet
