#include <gtest/gtest.h>

#include <random>

#include "cliniline/timeline/series.hpp"
#include "support/oracles.hpp"

namespace cliniline {
namespace {

NumericSeries numeric(std::vector<std::int64_t> times) {
  NumericSeries s{"crp", "CRP", "mg/L", {}};
  for (auto t : times) s.points.push_back({from_unix_ms(t), double(t), "o" + std::to_string(t)});
  return s;
}

std::vector<std::int64_t> times_of(const ClinicalSeries& s) {
  std::vector<std::int64_t> out;
  for (const auto& p : std::get<NumericSeries>(s).points) out.push_back(unix_ms(p.at));
  return out;
}

const Viewport kWindow(from_unix_ms(0), from_unix_ms(100));

TEST(SeriesWindowTest, AllInsideUnchanged) {
  const auto s = numeric({1, 20, 99});
  EXPECT_EQ(std::get<NumericSeries>(series_window(s, kWindow)), s);
}

TEST(SeriesWindowTest, EmptySeries) {
  EXPECT_TRUE(std::get<NumericSeries>(series_window(numeric({}), kWindow)).points.empty());
}

TEST(SeriesWindowTest, BoundaryNeighboursKept) {
  EXPECT_EQ(times_of(series_window(numeric({-10, 5, 50, 120}), kWindow)),
            (std::vector<std::int64_t>{-10, 5, 50, 120}));
  EXPECT_EQ(times_of(series_window(numeric({-30, -10, 5, 100, 120}), kWindow)),
            (std::vector<std::int64_t>{-10, 5, 100}));
}

TEST(SeriesWindowTest, NoPointsInsideStillKeepsNeighbours) {
  EXPECT_EQ(times_of(series_window(numeric({-50, -5, 150, 200}), kWindow)),
            (std::vector<std::int64_t>{-5, 150}));
}

TEST(SeriesWindowTest, UnsortedRejected) {
  try {
    series_window(numeric({5, 1}), kWindow);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomain);
  }
}

TEST(SeriesWindowTest, IntervalsIntersecting) {
  IntervalSet s{"rx", "Prescriptions", {}};
  auto add = [&](std::int64_t a, std::int64_t b) {
    s.intervals.push_back({from_unix_ms(a), from_unix_ms(b), "x", "rx", true});
  };
  add(-50, -1);
  add(-50, 0);
  add(-50, 1);
  add(50, 50);
  add(99, 300);
  add(100, 300);
  const auto out = std::get<IntervalSet>(series_window(s, kWindow));
  ASSERT_EQ(out.intervals.size(), 3u);
  EXPECT_EQ(unix_ms(out.intervals[0].end), 1);
  EXPECT_EQ(unix_ms(out.intervals[1].start), 50);
  EXPECT_EQ(unix_ms(out.intervals[2].start), 99);
  for (const auto& i : out.intervals) EXPECT_FALSE(i.clipped);
}

TEST(SeriesWindowTest, EventsInHalfOpenWindow) {
  EventSet s{"micro", "Microbiology", {}};
  for (std::int64_t t : {-1, 0, 50, 99, 100}) s.events.push_back({from_unix_ms(t), "e", "me"});
  const auto out = std::get<EventSet>(series_window(s, kWindow));
  ASSERT_EQ(out.events.size(), 3u);
  EXPECT_EQ(unix_ms(out.events.front().at), 0);
  EXPECT_EQ(unix_ms(out.events.back().at), 99);
}

TEST(SeriesWindowTest, MatchesMembershipOracle) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::int64_t> t(-500, 500);
  std::uniform_int_distribution<int> n(0, 40);
  for (int round = 0; round < 500; ++round) {
    std::vector<std::int64_t> times(static_cast<std::size_t>(n(rng)));
    for (auto& x : times) x = t(rng);
    std::sort(times.begin(), times.end());
    const auto s = numeric(times);
    std::int64_t a = t(rng), b = t(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const Viewport v(from_unix_ms(a), from_unix_ms(b));
    const auto got = std::get<NumericSeries>(series_window(s, v)).points;
    const auto idx = oracle::window_indices(s.points, v.start(), v.end());
    ASSERT_EQ(got.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) ASSERT_EQ(got[i], s.points[idx[i]]);
  }
}

}  // namespace
}  // namespace cliniline
