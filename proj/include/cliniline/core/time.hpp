#pragma once

// Instants are UTC milliseconds since the Unix epoch; durations are signed
// milliseconds. All arithmetic stays in exact integers.

#include <absl/time/civil_time.h>
#include <absl/time/time.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "cliniline/core/error.hpp"

namespace cliniline {

using Duration = std::chrono::milliseconds;
using Instant = std::chrono::sys_time<Duration>;

/// A calendar date without time zone. Day arithmetic is exact.
using CivilDate = absl::CivilDay;

constexpr Instant from_unix_ms(std::int64_t ms) { return Instant{Duration{ms}}; }
constexpr std::int64_t unix_ms(Instant t) { return t.time_since_epoch().count(); }

constexpr Duration hours(std::int64_t h) { return std::chrono::hours{h}; }
constexpr Duration minutes(std::int64_t m) { return std::chrono::minutes{m}; }
constexpr Duration days(std::int64_t d) { return std::chrono::hours{24 * d}; }

/// Half-open interval [start, end).
struct TimeRange {
  Instant start{};
  Instant end{};

  bool operator==(const TimeRange&) const = default;
};

inline absl::Time to_absl(Instant t) { return absl::FromUnixMillis(unix_ms(t)); }

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`, with a `.mmm` fraction only when the
/// instant is not on a whole second.
inline std::string format_instant(Instant t) {
  using namespace std::chrono;
  const auto day = floor<std::chrono::days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss tod{t - day};
  char buf[40];
  const auto ms = tod.subseconds().count();
  if (ms == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(tod.hours().count()),
                  static_cast<long long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(tod.hours().count()),
                  static_cast<long long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()),
                  static_cast<long long>(ms));
  }
  return buf;
}

/// Parses an RFC 3339 timestamp. An explicit offset (`Z` or `+hh:mm`) is
/// mandatory; the result is normalized to UTC and truncated to milliseconds.
inline Instant parse_instant(std::string_view text) {
  absl::Time t;
  std::string err;
  if (!absl::ParseTime(absl::RFC3339_full, std::string(text), &t, &err)) {
    throw Error(ErrorCode::kParse,
                "invalid timestamp '" + std::string(text) + "': " + err);
  }
  return from_unix_ms(absl::ToUnixMillis(t));
}

inline bool is_supported(CivilDate d) { return d.year() >= 1970 && d.year() <= 2100; }

/// Parses a strict `YYYY-MM-DD` calendar date.
inline CivilDate parse_date(std::string_view text) {
  auto digits = [&](std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
      if (text[i] < '0' || text[i] > '9') return false;
    }
    return true;
  };
  CivilDate d;
  const bool shaped = text.size() == 10 && text[4] == '-' && text[7] == '-' &&
                      digits(0, 4) && digits(5, 7) && digits(8, 10);
  if (!shaped || !absl::ParseCivilTime(std::string(text), &d)) {
    throw Error(ErrorCode::kParse, "invalid calendar date '" + std::string(text) + "'");
  }
  return d;
}

inline std::string format_date(CivilDate d) { return absl::FormatCivilTime(d); }

}  // namespace cliniline
