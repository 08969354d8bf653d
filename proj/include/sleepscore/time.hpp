#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace sleepscore {

struct CivilDate {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;
};

struct CivilTime {
    CivilDate date;
    unsigned hour = 0;
    unsigned minute = 0;
    unsigned second = 0;
};

// Days since 1970-01-01 of a proleptic Gregorian date (Hinnant's algorithm).
constexpr std::int64_t days_from_civil(int y, unsigned m, unsigned d) noexcept {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr CivilDate civil_from_days(std::int64_t z) noexcept {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

// A point in time with the fixed UTC offset it was recorded in. No timezone
// database lookups; the offset embedded in the timestamp is all we keep.
struct ZonedTime {
    std::int64_t epoch_seconds = 0;  // UTC
    std::int32_t offset_seconds = 0;

    friend bool operator==(const ZonedTime&, const ZonedTime&) = default;
};

inline CivilTime local_civil(const ZonedTime& t) noexcept {
    std::int64_t local = t.epoch_seconds + t.offset_seconds;
    std::int64_t days = local / 86400;
    std::int64_t sod = local % 86400;
    if (sod < 0) {
        sod += 86400;
        --days;
    }
    CivilTime out;
    out.date = civil_from_days(days);
    out.hour = static_cast<unsigned>(sod / 3600);
    out.minute = static_cast<unsigned>((sod % 3600) / 60);
    out.second = static_cast<unsigned>(sod % 60);
    return out;
}

inline ZonedTime make_zoned(int year, unsigned month, unsigned day, unsigned hour,
                            unsigned minute, unsigned second, std::int32_t offset_seconds) noexcept {
    std::int64_t local = days_from_civil(year, month, day) * 86400 +
                         hour * 3600 + minute * 60 + second;
    return ZonedTime{local - offset_seconds, offset_seconds};
}

namespace detail {

inline bool parse_uint(std::string_view s, unsigned& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

inline bool parse_int(std::string_view s, int& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace detail

// Accepts %Y-%m-%dT%H:%M:%S%z with the offset written as +HHMM, +HH:MM or Z.
inline std::optional<ZonedTime> parse_timestamp(std::string_view s) {
    // minimal form: 2023-01-05T01:00:00Z has 20 chars
    if (s.size() < 20) return std::nullopt;
    if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
        s[13] != ':' || s[16] != ':') {
        return std::nullopt;
    }
    int year;
    unsigned month, day, hour, minute, second;
    if (!detail::parse_int(s.substr(0, 4), year) ||
        !detail::parse_uint(s.substr(5, 2), month) ||
        !detail::parse_uint(s.substr(8, 2), day) ||
        !detail::parse_uint(s.substr(11, 2), hour) ||
        !detail::parse_uint(s.substr(14, 2), minute) ||
        !detail::parse_uint(s.substr(17, 2), second)) {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 ||
        minute > 59 || second > 60) {
        return std::nullopt;
    }
    std::string_view rest = s.substr(19);
    std::int32_t offset = 0;
    if (rest == "Z" || rest == "z") {
        offset = 0;
    } else if ((rest[0] == '+' || rest[0] == '-') &&
               (rest.size() == 5 || rest.size() == 6)) {
        unsigned oh, om;
        bool ok;
        if (rest.size() == 5) {
            ok = detail::parse_uint(rest.substr(1, 2), oh) &&
                 detail::parse_uint(rest.substr(3, 2), om);
        } else {
            ok = rest[3] == ':' && detail::parse_uint(rest.substr(1, 2), oh) &&
                 detail::parse_uint(rest.substr(4, 2), om);
        }
        if (!ok || oh > 18 || om > 59) return std::nullopt;
        offset = static_cast<std::int32_t>(oh * 3600 + om * 60);
        if (rest[0] == '-') offset = -offset;
    } else {
        return std::nullopt;
    }
    return make_zoned(year, month, day, hour, minute, second, offset);
}

// %Y-%m-%dT%H:%M:%S%z with a +HHMM offset, e.g. 2023-01-05T19:00:00-0500.
inline std::string format_timestamp(const ZonedTime& t) {
    CivilTime c = local_civil(t);
    std::int32_t off = t.offset_seconds;
    char sign = off < 0 ? '-' : '+';
    if (off < 0) off = -off;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:%02u:%02u%c%02d%02d",
                  c.date.year, c.date.month, c.date.day, c.hour, c.minute,
                  c.second, sign, off / 3600, (off % 3600) / 60);
    return std::string(buf);
}

}  // namespace sleepscore
