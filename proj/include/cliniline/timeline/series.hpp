#pragma once

#include <algorithm>
#include <iterator>
#include <string>
#include <variant>
#include <vector>

#include "cliniline/core/error.hpp"
#include "cliniline/core/time.hpp"
#include "cliniline/timeline/viewport.hpp"

namespace cliniline {

struct SeriesPoint {
  Instant at{};
  double value = 0.0;
  std::string source_id;

  bool operator==(const SeriesPoint&) const = default;
};

struct NumericSeries {
  std::string id;
  std::string label;
  std::string unit;
  std::vector<SeriesPoint> points;

  bool operator==(const NumericSeries&) const = default;
};

struct SeriesInterval {
  Instant start{};
  Instant end{};
  std::string label;
  std::string source_id;
  bool clipped = false;

  bool operator==(const SeriesInterval&) const = default;
};

struct IntervalSet {
  std::string id;
  std::string label;
  std::vector<SeriesInterval> intervals;

  bool operator==(const IntervalSet&) const = default;
};

struct SeriesEvent {
  Instant at{};
  std::string label;
  std::string source_id;

  bool operator==(const SeriesEvent&) const = default;
};

struct EventSet {
  std::string id;
  std::string label;
  std::vector<SeriesEvent> events;

  bool operator==(const EventSet&) const = default;
};

using ClinicalSeries = std::variant<NumericSeries, IntervalSet, EventSet>;

namespace detail {

template <typename Range, typename Key>
void require_sorted(const Range& r, Key key, const std::string& id) {
  const bool sorted = std::is_sorted(r.begin(), r.end(), [&](const auto& a, const auto& b) {
    return key(a) < key(b);
  });
  if (!sorted) throw Error(ErrorCode::kDomain, "series '" + id + "' is not sorted by time");
}

inline NumericSeries window(const NumericSeries& s, const Viewport& v) {
  require_sorted(s.points, [](const SeriesPoint& p) { return p.at; }, s.id);
  NumericSeries out{s.id, s.label, s.unit, {}};
  auto first_in = std::lower_bound(s.points.begin(), s.points.end(), v.start(),
                                   [](const SeriesPoint& p, Instant t) { return p.at < t; });
  auto first_after = std::lower_bound(first_in, s.points.end(), v.end(),
                                      [](const SeriesPoint& p, Instant t) { return p.at < t; });
  // One neighbour on each side keeps the drawn line continuous at the edges.
  auto from = first_in == s.points.begin() ? first_in : std::prev(first_in);
  auto to = first_after == s.points.end() ? first_after : std::next(first_after);
  out.points.assign(from, to);
  return out;
}

inline IntervalSet window(const IntervalSet& s, const Viewport& v) {
  require_sorted(s.intervals, [](const SeriesInterval& i) { return i.start; }, s.id);
  IntervalSet out{s.id, s.label, {}};
  for (const auto& i : s.intervals) {
    const bool hit = i.end > i.start ? (i.start < v.end() && i.end > v.start()) : v.contains(i.start);
    if (hit) {
      out.intervals.push_back(i);
      out.intervals.back().clipped = false;
    }
  }
  return out;
}

inline EventSet window(const EventSet& s, const Viewport& v) {
  require_sorted(s.events, [](const SeriesEvent& e) { return e.at; }, s.id);
  EventSet out{s.id, s.label, {}};
  for (const auto& e : s.events) {
    if (v.contains(e.at)) out.events.push_back(e);
  }
  return out;
}

}  // namespace detail

/// Restricts a series to the viewport. Numeric series also keep the nearest
/// point outside each edge.
inline ClinicalSeries series_window(const ClinicalSeries& series, const Viewport& v) {
  return std::visit([&](const auto& s) -> ClinicalSeries { return detail::window(s, v); }, series);
}

}  // namespace cliniline
