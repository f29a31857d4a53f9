#pragma once

#include <set>
#include <string>
#include <vector>

#include "cliniline/calendar/business_calendar.hpp"
#include "cliniline/core/time.hpp"

namespace fixtures {

inline cliniline::Instant at(const char* iso) { return cliniline::parse_instant(iso); }

inline std::set<cliniline::CivilDate> dates(const std::vector<std::string>& iso) {
  std::set<cliniline::CivilDate> out;
  for (const auto& d : iso) out.insert(cliniline::parse_date(d));
  return out;
}

inline cliniline::BusinessCalendar calendar(const std::vector<std::string>& holidays = {},
                                            const char* tz = "Europe/Paris") {
  return cliniline::BusinessCalendar(
      tz, {cliniline::Weekday::saturday, cliniline::Weekday::sunday}, dates(holidays));
}

}  // namespace fixtures
