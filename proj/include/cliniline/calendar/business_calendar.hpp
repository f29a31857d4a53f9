#pragma once

#include <absl/time/civil_time.h>
#include <absl/time/time.h>

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cliniline/core/error.hpp"
#include "cliniline/core/time.hpp"
#include "cliniline/timeline/viewport.hpp"

namespace cliniline {

using Weekday = absl::Weekday;

inline constexpr std::array<std::pair<std::string_view, Weekday>, 7> kWeekdayNames = {{
    {"monday", Weekday::monday},
    {"tuesday", Weekday::tuesday},
    {"wednesday", Weekday::wednesday},
    {"thursday", Weekday::thursday},
    {"friday", Weekday::friday},
    {"saturday", Weekday::saturday},
    {"sunday", Weekday::sunday},
}};

inline std::string_view to_string(Weekday w) {
  for (const auto& [name, day] : kWeekdayNames) {
    if (day == w) return name;
  }
  return "monday";
}

/// Accepts full lowercase names or their three-letter prefixes.
inline Weekday parse_weekday(std::string_view s) {
  for (const auto& [name, day] : kWeekdayNames) {
    if (s == name || (s.size() == 3 && name.substr(0, 3) == s)) return day;
  }
  throw Error(ErrorCode::kParse, "unknown weekday '" + std::string(s) + "'");
}

/// Weekend policy, holiday dates and the civil time zone they are read in.
class BusinessCalendar {
 public:
  BusinessCalendar() : BusinessCalendar("Europe/Paris") {}

  explicit BusinessCalendar(std::string timezone,
                            std::set<Weekday> weekend = {Weekday::saturday, Weekday::sunday},
                            std::set<CivilDate> holidays = {})
      : timezone_(std::move(timezone)),
        weekend_(std::move(weekend)),
        holidays_(std::move(holidays)) {
    if (!absl::LoadTimeZone(timezone_, &zone_)) {
      throw Error(ErrorCode::kDomain, "unknown time zone '" + timezone_ + "'");
    }
  }

  const std::string& timezone() const { return timezone_; }
  const absl::TimeZone& zone() const { return zone_; }
  const std::set<Weekday>& weekend_days() const { return weekend_; }
  const std::set<CivilDate>& holidays() const { return holidays_; }

  BusinessCalendar with_holidays(const std::set<CivilDate>& extra) const {
    BusinessCalendar copy = *this;
    copy.holidays_.insert(extra.begin(), extra.end());
    return copy;
  }

  /// Weekday/holiday test without the supported-range check.
  bool business(CivilDate d) const {
    return !weekend_.contains(absl::GetWeekday(d)) && !holidays_.contains(d);
  }

  CivilDate date_of(Instant t) const {
    return CivilDate(absl::ToCivilSecond(to_absl(t), zone_));
  }

  /// First instant carrying the given wall-clock reading. A wall time skipped
  /// by a DST jump maps to the transition instant; a repeated one maps to its
  /// first occurrence.
  Instant instant_of(absl::CivilSecond wall) const {
    const auto info = zone_.At(wall);
    const absl::Time t = info.kind == absl::TimeZone::TimeInfo::SKIPPED ? info.trans : info.pre;
    return from_unix_ms(absl::ToUnixMillis(t));
  }

  Instant start_of(CivilDate d) const { return instant_of(absl::CivilSecond(d)); }

  bool operator==(const BusinessCalendar& o) const {
    return timezone_ == o.timezone_ && weekend_ == o.weekend_ && holidays_ == o.holidays_;
  }

 private:
  std::string timezone_;
  absl::TimeZone zone_;
  std::set<Weekday> weekend_;
  std::set<CivilDate> holidays_;
};

/// True iff the date is neither a weekend day nor a holiday.
inline bool is_business_day(CivilDate date, const BusinessCalendar& cal) {
  if (!is_supported(date)) {
    throw Error(ErrorCode::kRange,
                "date " + format_date(date) + " outside supported range 1970-2100");
  }
  return cal.business(date);
}

inline constexpr int kAnticipationScanDays = 366;

/// Moves a deadline that falls on a non-business day back to the same wall
/// clock time on the latest earlier business day. Business-day deadlines are
/// returned unchanged.
inline Instant anticipate(Instant due, const BusinessCalendar& cal) {
  const absl::CivilSecond wall = absl::ToCivilSecond(to_absl(due), cal.zone());
  const CivilDate day(wall);
  if (cal.business(day)) return due;

  // ToCivilSecond drops the sub-second part; carry it over.
  const auto ms = ((unix_ms(due) % 1000) + 1000) % 1000;
  for (int back = 1; back <= kAnticipationScanDays; ++back) {
    const CivilDate candidate = day - back;
    if (!cal.business(candidate)) continue;
    const absl::CivilSecond moved(candidate.year(), candidate.month(), candidate.day(),
                                  wall.hour(), wall.minute(), wall.second());
    return std::min(due, cal.instant_of(moved) + Duration{ms});
  }
  throw Error(ErrorCode::kCalendarExhausted,
              "no business day within " + std::to_string(kAnticipationScanDays) +
                  " days before " + format_instant(due));
}

/// Sorted, disjoint, maximal intervals covering the non-business days that
/// intersect the window. Day boundaries are civil midnights in the calendar
/// time zone.
inline std::vector<TimeRange> non_business_bands(const Viewport& window,
                                                 const BusinessCalendar& cal) {
  std::vector<TimeRange> bands;
  const CivilDate first = cal.date_of(window.start());
  const CivilDate last = cal.date_of(window.end() - Duration{1});
  for (CivilDate d = first; d <= last; ++d) {
    if (cal.business(d)) continue;
    const Instant from = std::max(cal.start_of(d), window.start());
    const Instant to = std::min(cal.start_of(d + 1), window.end());
    if (!bands.empty() && bands.back().end == from) {
      bands.back().end = to;
    } else {
      bands.push_back({from, to});
    }
  }
  return bands;
}

}  // namespace cliniline
