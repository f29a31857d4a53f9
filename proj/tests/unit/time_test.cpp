#include <gtest/gtest.h>

#include "cliniline/core/time.hpp"

namespace cliniline {
namespace {

TEST(InstantFormatTest, WholeSecondsOmitFraction) {
  EXPECT_EQ(format_instant(from_unix_ms(1704484800000)), "2024-01-05T20:00:00Z");
}

TEST(InstantFormatTest, MillisecondsShown) {
  EXPECT_EQ(format_instant(from_unix_ms(1704484800007)), "2024-01-05T20:00:00.007Z");
}

TEST(InstantFormatTest, BeforeEpoch) {
  EXPECT_EQ(format_instant(from_unix_ms(-1)), "1969-12-31T23:59:59.999Z");
}

TEST(InstantParseTest, OffsetNormalizedToUtc) {
  EXPECT_EQ(parse_instant("2024-01-05T21:00:00+01:00"), parse_instant("2024-01-05T20:00:00Z"));
}

TEST(InstantParseTest, MissingOffsetRejected) {
  try {
    parse_instant("2024-01-05T20:00:00");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(InstantParseTest, RoundTripsOnMillisecondGrid) {
  for (std::int64_t ms : {0LL, 1LL, 999LL, 1704484800123LL, 4102444799999LL}) {
    EXPECT_EQ(unix_ms(parse_instant(format_instant(from_unix_ms(ms)))), ms);
  }
}

TEST(CivilDateTest, StrictFormat) {
  EXPECT_EQ(format_date(parse_date("2024-02-29")), "2024-02-29");
  EXPECT_THROW(parse_date("2024-2-3"), Error);
  EXPECT_THROW(parse_date("2023-02-29"), Error);
  EXPECT_THROW(parse_date("2024-01-01T00:00:00Z"), Error);
}

}  // namespace
}  // namespace cliniline
