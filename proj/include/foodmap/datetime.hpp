#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace foodmap {

// Proleptic Gregorian calendar date.
struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  friend constexpr bool operator==(const CivilDate&, const CivilDate&) = default;
};

// Days since 1970-01-01. Standard era-based civil calendar arithmetic.
constexpr std::int64_t days_from_civil(CivilDate d) {
  int y = d.year;
  const int m = d.month;
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d.day) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned day = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
                   static_cast<int>(day)};
}

constexpr bool is_leap_year(int y) {
  return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

constexpr int days_in_month(int year, int month) {
  constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap_year(year)) return 29;
  return lengths[month - 1];
}

constexpr bool valid_date(CivilDate d) {
  return d.month >= 1 && d.month <= 12 && d.day >= 1 &&
         d.day <= days_in_month(d.year, d.month);
}

constexpr CivilDate add_days(CivilDate d, std::int64_t n) {
  return civil_from_days(days_from_civil(d) + n);
}

// An absolute instant together with the local wall-clock view in which it was
// written. Slot assignment and day attribution use the local fields; recency
// ordering uses the UTC instant.
struct Timestamp {
  std::int64_t utc_seconds = 0;   // seconds since the epoch, UTC
  CivilDate local_date;           // calendar date at the source offset
  int local_second_of_day = 0;    // 0..86399
  int offset_minutes = 0;

  friend constexpr bool operator==(const Timestamp&, const Timestamp&) = default;
};

namespace detail {

inline bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len,
                             int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

}  // namespace detail

// "YYYY-MM-DD"
inline std::optional<CivilDate> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  int y, m, d;
  if (!detail::parse_fixed_uint(s, 0, 4, y) || !detail::parse_fixed_uint(s, 5, 2, m) ||
      !detail::parse_fixed_uint(s, 8, 2, d))
    return std::nullopt;
  CivilDate date{y, m, d};
  if (!valid_date(date)) return std::nullopt;
  return date;
}

inline std::string format_date(CivilDate d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

// RFC 3339 timestamp with mandatory offset ("Z" or "+hh:mm"/"-hh:mm").
// Fractional seconds are accepted and truncated.
inline std::optional<Timestamp> parse_rfc3339(std::string_view s) {
  if (s.size() < 20) return std::nullopt;
  auto date = parse_date(s.substr(0, 10));
  if (!date) return std::nullopt;
  if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
  int hh, mm, ss;
  if (!detail::parse_fixed_uint(s, 11, 2, hh) || s[13] != ':' ||
      !detail::parse_fixed_uint(s, 14, 2, mm) || s[16] != ':' ||
      !detail::parse_fixed_uint(s, 17, 2, ss))
    return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;

  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      ++pos;
      ++digits;
    }
    if (digits == 0) return std::nullopt;
  }
  if (pos >= s.size()) return std::nullopt;

  int offset = 0;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    if (pos + 1 != s.size()) return std::nullopt;
  } else if (s[pos] == '+' || s[pos] == '-') {
    int oh, om;
    if (pos + 6 != s.size() || !detail::parse_fixed_uint(s, pos + 1, 2, oh) ||
        s[pos + 3] != ':' || !detail::parse_fixed_uint(s, pos + 4, 2, om))
      return std::nullopt;
    if (oh > 23 || om > 59) return std::nullopt;
    offset = oh * 60 + om;
    if (s[pos] == '-') offset = -offset;
  } else {
    return std::nullopt;
  }

  Timestamp t;
  t.local_date = *date;
  t.local_second_of_day = hh * 3600 + mm * 60 + ss;
  t.offset_minutes = offset;
  t.utc_seconds = days_from_civil(*date) * 86400 + t.local_second_of_day -
                  static_cast<std::int64_t>(offset) * 60;
  return t;
}

inline std::string format_rfc3339(const Timestamp& t) {
  const int sod = t.local_second_of_day;
  char buf[40];
  if (t.offset_minutes == 0) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  t.local_date.year, t.local_date.month, t.local_date.day,
                  sod / 3600, (sod / 60) % 60, sod % 60);
  } else {
    const int off = t.offset_minutes;
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d%c%02d:%02d",
                  t.local_date.year, t.local_date.month, t.local_date.day,
                  sod / 3600, (sod / 60) % 60, sod % 60, off < 0 ? '-' : '+',
                  std::abs(off) / 60, std::abs(off) % 60);
  }
  return buf;
}

}  // namespace foodmap
