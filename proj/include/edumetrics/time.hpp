// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "edumetrics/text.hpp"

namespace edumetrics {

using Date = std::chrono::sys_days;
using Instant = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

namespace time_detail {

template <typename Int>
inline std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  if (s.empty()) return std::nullopt;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<unsigned> month_from_abbrev(std::string_view m) {
  static constexpr std::array<std::string_view, 12> names{
      "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};
  auto lm = text::lower(m);
  for (unsigned i = 0; i < names.size(); ++i)
    if (names[i] == lm) return i + 1;
  return std::nullopt;
}

inline bool all_digits(std::string_view s) {
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return !s.empty();
}

}  // namespace time_detail

/// Strict YYYY-MM-DD.
inline std::optional<Date> parse_iso_date(std::string_view s) {
  using namespace time_detail;
  s = text::trim(s);
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!all_digits(s.substr(0, 4)) || !all_digits(s.substr(5, 2)) || !all_digits(s.substr(8, 2)))
    return std::nullopt;
  auto y = parse_int<int>(s.substr(0, 4));
  auto m = parse_int<unsigned>(s.substr(5, 2));
  auto d = parse_int<unsigned>(s.substr(8, 2));
  std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*m}, std::chrono::day{*d}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

/// Accepts YYYY-MM-DD (midnight UTC) or YYYY-MM-DDTHH:MM:SS with an optional
/// trailing Z.
inline std::optional<Instant> parse_iso_instant(std::string_view s) {
  using namespace time_detail;
  s = text::trim(s);
  auto date = parse_iso_date(s.substr(0, std::min<std::size_t>(10, s.size())));
  if (!date) return std::nullopt;
  Instant t{std::chrono::time_point_cast<Seconds>(*date)};
  if (s.size() == 10) return t;
  auto rest = s.substr(10);
  if (rest.size() < 9 || (rest[0] != 'T' && rest[0] != ' ') || rest[3] != ':' || rest[6] != ':')
    return std::nullopt;
  if (rest.size() == 10 && rest[9] != 'Z') return std::nullopt;
  if (rest.size() > 10) return std::nullopt;
  auto hh = parse_int<int>(rest.substr(1, 2));
  auto mm = parse_int<int>(rest.substr(4, 2));
  auto ss = parse_int<int>(rest.substr(7, 2));
  if (!hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 60) return std::nullopt;
  return t + std::chrono::hours{*hh} + std::chrono::minutes{*mm} + Seconds{*ss};
}

/// Common Log Format timestamp without brackets: 10/Oct/2000:13:55:36 -0700.
/// Returned in UTC.
inline std::optional<Instant> parse_clf_timestamp(std::string_view s) {
  using namespace time_detail;
  if (s.size() != 26 || s[2] != '/' || s[6] != '/' || s[11] != ':' || s[14] != ':' ||
      s[17] != ':' || s[20] != ' ')
    return std::nullopt;
  auto d = parse_int<unsigned>(s.substr(0, 2));
  auto mon = month_from_abbrev(s.substr(3, 3));
  auto y = parse_int<int>(s.substr(7, 4));
  auto hh = parse_int<int>(s.substr(12, 2));
  auto mm = parse_int<int>(s.substr(15, 2));
  auto ss = parse_int<int>(s.substr(18, 2));
  char sign = s[21];
  auto zh = parse_int<int>(s.substr(22, 2));
  auto zm = parse_int<int>(s.substr(24, 2));
  if (!d || !mon || !y || !hh || !mm || !ss || !zh || !zm || (sign != '+' && sign != '-'))
    return std::nullopt;
  if (*hh > 23 || *mm > 59 || *ss > 60 || *zm > 59) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*mon}, std::chrono::day{*d}};
  if (!ymd.ok()) return std::nullopt;
  Instant local = std::chrono::time_point_cast<Seconds>(Date{ymd}) + std::chrono::hours{*hh} +
                  std::chrono::minutes{*mm} + Seconds{*ss};
  Seconds offset = std::chrono::hours{*zh} + std::chrono::minutes{*zm};
  return sign == '+' ? local - offset : local + offset;
}

inline std::string format_date(Date d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::string format_instant(Instant t) {
  auto day = std::chrono::floor<std::chrono::days>(t);
  std::chrono::hh_mm_ss hms{t - day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count()));
  return format_date(Date{day}) + buf;
}

/// CLF timestamp in UTC (+0000), the inverse of parse_clf_timestamp.
inline std::string format_clf_timestamp(Instant t) {
  static constexpr const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                           "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  auto day = std::chrono::floor<std::chrono::days>(t);
  std::chrono::year_month_day ymd{day};
  std::chrono::hh_mm_ss hms{t - day};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%02u/%s/%04d:%02d:%02d:%02d +0000",
                static_cast<unsigned>(ymd.day()), months[static_cast<unsigned>(ymd.month()) - 1],
                static_cast<int>(ymd.year()), static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count()));
  return buf;
}

/// "90", "90s", "30m", "2h", "1d" (seconds when no unit).
inline std::optional<Seconds> parse_duration(std::string_view s) {
  s = text::trim(s);
  if (s.empty()) return std::nullopt;
  std::int64_t mult = 1;
  switch (s.back()) {
    case 's': mult = 1; s.remove_suffix(1); break;
    case 'm': mult = 60; s.remove_suffix(1); break;
    case 'h': mult = 3600; s.remove_suffix(1); break;
    case 'd': mult = 86400; s.remove_suffix(1); break;
    default: break;
  }
  auto v = time_detail::parse_int<std::int64_t>(s);
  if (!v || *v < 0) return std::nullopt;
  return Seconds{*v * mult};
}

inline Instant to_instant(Date d) { return std::chrono::time_point_cast<Seconds>(d); }

}  // namespace edumetrics
