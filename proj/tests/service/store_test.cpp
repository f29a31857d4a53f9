#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "cliniline/service/config.hpp"
#include "cliniline/service/events.hpp"
#include "cliniline/service/store.hpp"
#include "cliniline/service/wire.hpp"
#include "support/fixtures.hpp"
#include "support/service.hpp"

namespace cliniline {
namespace {

using fixtures::at;

// ---------------------------------------------------------------------------
// Configuration

TEST(ConfigTest, DefaultsWhenEmpty) {
  const ServiceConfig cfg = parse_config(Json::object());
  EXPECT_EQ(cfg.timezone, "Europe/Paris");
  EXPECT_EQ(cfg.rule_set.rules.size(), 3u);
  EXPECT_EQ(cfg.port, 8080);
  EXPECT_EQ(cfg.thresholds.critical_below, hours(6));
  EXPECT_TRUE(cfg.profession_codes().contains("judge-liaison"));
}

TEST(ConfigTest, ReadsEveryKey) {
  const ServiceConfig cfg = parse_config(Json::parse(R"({
    "timezone": "America/New_York",
    "weekendDays": ["fri", "saturday"],
    "urgencyThresholds": {"criticalBelowH": 2, "warningBelowH": 12, "cautionBelowH": 36},
    "viewport": {"minSpanMin": 10, "maxSpanDays": 30},
    "ruleSet": [{"id": "r", "label": "R", "profession": "nurse", "offsetH": 1.5, "periodH": 6}],
    "port": 9000,
    "dataDir": "/tmp/x",
    "taskHorizonDays": 2
  })"));
  EXPECT_EQ(cfg.timezone, "America/New_York");
  EXPECT_EQ(cfg.weekend_days, (std::set<Weekday>{Weekday::friday, Weekday::saturday}));
  EXPECT_EQ(cfg.thresholds.warning_below, hours(12));
  EXPECT_EQ(cfg.limits.min_span, minutes(10));
  EXPECT_EQ(cfg.limits.max_span, days(30));
  ASSERT_EQ(cfg.rule_set.rules.size(), 1u);
  EXPECT_EQ(cfg.rule_set.rules[0].offset, minutes(90));
  EXPECT_EQ(cfg.rule_set.rules[0].period, hours(6));
  EXPECT_EQ(cfg.port, 9000);
  EXPECT_EQ(cfg.data_dir, "/tmp/x");
  EXPECT_EQ(cfg.task_horizon, days(2));
}

TEST(ConfigTest, RejectsBadValues) {
  EXPECT_THROW(parse_config(Json::parse(R"({"timezone": "Mars/Olympus"})")), Error);
  EXPECT_THROW(parse_config(Json::parse(R"({"ruleSet": [{"id": "r", "profession": "x", "offsetH": 0}]})")), Error);
  EXPECT_THROW(parse_config(Json::parse(R"({"urgencyThresholds": {"criticalBelowH": 50}})")), Error);
  EXPECT_THROW(parse_config(Json::parse(R"({"viewport": {"minSpanMin": 0}})")), Error);
  EXPECT_THROW(parse_config(Json::parse(R"({"port": "eighty"})")), Error);
  EXPECT_THROW(parse_config(Json::parse(R"([1, 2])")), Error);
}

TEST(ConfigTest, ReferenceFixtureLoads) {
  const ServiceConfig cfg = fixtures::reference_config();
  ASSERT_EQ(cfg.rule_set.rules.size(), 1u);
  EXPECT_EQ(cfg.rule_set.rules[0].offset, hours(72));
  EXPECT_EQ(cfg.rule_set.rules[0].anticipation, AnticipationPolicy::kBusinessDay);
}

// ---------------------------------------------------------------------------
// Wire format

EntityBatch random_batch(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(0, 4);
  std::uniform_int_distribution<std::int64_t> ms(0, 4LL * 365 * 86'400'000);
  const std::int64_t base = unix_ms(at("2022-01-01T00:00:00Z"));
  auto instant = [&] { return from_unix_ms(base + ms(rng)); };
  EntityBatch b;
  for (int i = small(rng); i > 0; --i) b.units.push_back({"u" + std::to_string(i), "Unit é " + std::to_string(i)});
  for (int i = small(rng); i > 0; --i) b.patients.push_back({"p" + std::to_string(i), "Patient \"" + std::to_string(i) + "\"", "u1"});
  for (int i = small(rng); i > 0; --i) {
    const Instant s = instant();
    b.measures.push_back({"m" + std::to_string(i), "p1", i % 2 ? MeasureKind::kIsolation : MeasureKind::kRestraint, s,
                          i % 3 ? std::optional<Instant>(s + hours(i)) : std::nullopt});
  }
  for (int i = small(rng); i > 0; --i) b.prescriptions.push_back({"rx" + std::to_string(i), "p1", "Drug", instant(), std::nullopt});
  for (int i = small(rng); i > 0; --i) {
    b.observations.push_back({"o" + std::to_string(i), "p1", "crp", 0.1 * i + 3.25, "mg/L", instant(),
                              i % 2 ? Theme::kEfficacy : Theme::kTolerance});
  }
  for (int i = small(rng); i > 0; --i) {
    const Instant s = instant();
    b.micro_events.push_back({"e" + std::to_string(i), "p1", "Culture", s, s + hours(30), std::string("E. coli")});
  }
  for (int i = small(rng); i > 0; --i) {
    b.annotations.push_back({"a" + std::to_string(i), "p1", "note", instant(), {"nurse"}, Theme::kMicrobiology});
  }
  for (int i = small(rng); i > 0; --i) b.holidays.push_back(CivilDate(2024, 1, i));
  return b;
}

TEST(WireTest, BatchRoundTripsThroughJson) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const EntityBatch b = random_batch(rng);
    EXPECT_EQ(wire::parse_batch(wire::to_json(b).dump()), b);
  }
}

TEST(WireTest, OffsetsNormalizeToUtc) {
  const auto b = wire::parse_batch(R"({"measures": [{"id": "m", "patientId": "p", "kind": "isolation",
                                         "startAt": "2024-01-05T21:00:00+01:00"}]})");
  ASSERT_EQ(b.measures.size(), 1u);
  EXPECT_EQ(b.measures[0].start_at, at("2024-01-05T20:00:00Z"));
  EXPECT_EQ(wire::to_json(b.measures[0])["startAt"], "2024-01-05T20:00:00Z");
}

TEST(WireTest, MissingKeysAreEmptyCollections) {
  EXPECT_EQ(wire::parse_batch("{}"), EntityBatch{});
}

TEST(WireTest, MalformedInputIsParseError) {
  for (const char* text : {"not json", "[]", R"({"patients": [{"id": 3}]})",
                           R"({"measures": [{"id": "m", "patientId": "p", "kind": "isolation", "startAt": "2024-01-05T20:00:00"}]})",
                           R"({"holidays": ["2024-13-01"]})"}) {
    try {
      wire::parse_batch(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse) << text;
    }
  }
}

TEST(WireTest, TaskRoundTrip) {
  TaskInstance t;
  t.id = "m1:r:2";
  t.rule_id = "r";
  t.measure_id = "m1";
  t.patient_id = "p1";
  t.unit_id = "u1";
  t.label = "R";
  t.profession = {"nurse"};
  t.sequence = 2;
  t.due_at = at("2024-01-08T20:00:00Z");
  t.anticipated_due_at = at("2024-01-05T20:00:00Z");
  t.status = TaskStatus::kCompleted;
  t.completed_at = at("2024-01-05T10:00:00.250Z");
  t.completed_by = Profession{"nurse"};
  EXPECT_EQ(wire::task_from_json(wire::to_json(t)), t);
}

// ---------------------------------------------------------------------------
// Event hub

TEST(EventHubTest, NoReplayForLateSubscribers) {
  EventHub hub;
  hub.publish({"data-ingested", "b1", 1});
  auto sub = hub.subscribe();
  EXPECT_EQ(sub->joined_at(), 1u);
  EXPECT_FALSE(sub->next(std::chrono::milliseconds(1)));
  hub.publish({"task-validated", "t1", 2});
  const auto ev = sub->next(std::chrono::milliseconds(100));
  ASSERT_TRUE(ev);
  EXPECT_EQ(*ev, (ChangeEvent{"task-validated", "t1", 2}));
}

TEST(EventHubTest, ShutdownClosesStreams) {
  EventHub hub;
  auto sub = hub.subscribe();
  hub.shutdown();
  EXPECT_FALSE(sub->next(std::chrono::milliseconds(10)));
  EXPECT_TRUE(sub->closed());
  EXPECT_TRUE(hub.subscribe()->closed());
}

// ---------------------------------------------------------------------------
// Store

TEST(StoreTest, EmptyBatchBumpsRevision) {
  Store store{ServiceConfig{}};
  const auto s = store.ingest({});
  EXPECT_EQ(s.revision, 1u);
  EXPECT_EQ(s.batch_id, "batch-1");
  for (const auto& [k, v] : s.counts) EXPECT_EQ(v, 0u) << k;
}

TEST(StoreTest, CountsPerEntityType) {
  Store store{ServiceConfig{}};
  EntityBatch b;
  b.units = {{"u1", "Unit"}};
  b.patients = {{"p1", "A", "u1"}, {"p2", "B", "u1"}};
  b.measures = {{"m1", "p1", MeasureKind::kIsolation, at("2024-01-05T20:00:00Z"), std::nullopt}};
  const auto s = store.ingest(b, "b-42");
  EXPECT_EQ(s.counts.at("patients"), 2u);
  EXPECT_EQ(s.counts.at("units"), 1u);
  EXPECT_EQ(s.counts.at("measures"), 1u);
  EXPECT_EQ(s.batch_id, "b-42");
  EXPECT_EQ(store.snapshot()->patients.size(), 2u);
}

TEST(StoreTest, RejectedBatchLeavesStoreUnchanged) {
  Store store{ServiceConfig{}};
  store.ingest(fixtures::reference_batch());
  const Snapshot before = store.snapshot();
  auto sub = store.events().subscribe();

  EntityBatch bad;
  bad.patients = {{"p9", "Z", "u1"}};
  bad.measures = {{"m9", "ghost", MeasureKind::kIsolation, at("2024-01-05T20:00:00Z"), std::nullopt}};
  try {
    store.ingest(bad);
    FAIL() << "expected rejection";
  } catch (const ValidationFailed& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_EQ(e.report().size(), 1u);
    EXPECT_EQ(e.report().count(IssueKind::kDanglingReference), 1u);
  }
  EXPECT_EQ(store.snapshot(), before);
  EXPECT_FALSE(sub->next(std::chrono::milliseconds(1)));
}

TEST(StoreTest, GeneratesTasksForMeasures) {
  Store store{fixtures::reference_config()};
  const auto s = store.ingest(fixtures::reference_batch());
  EXPECT_EQ(s.tasks_generated, 1u);
  const auto snap = store.snapshot();
  const TaskInstance* t = snap->tasks.find("m1:jld-referral:1");
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->due_at, at("2024-01-08T20:00:00Z"));
  EXPECT_EQ(t->anticipated_due_at, at("2024-01-05T20:00:00Z"));
  EXPECT_EQ(t->unit_id, "u1");
}

TEST(StoreTest, HolidayIngestRegeneratesAnticipation) {
  Store store{fixtures::reference_config()};
  EntityBatch b = fixtures::reference_batch();
  b.holidays.clear();
  store.ingest(b);
  // Without the holiday Monday is itself a business day.
  EXPECT_EQ(store.snapshot()->tasks.find("m1:jld-referral:1")->anticipated_due_at, at("2024-01-08T20:00:00Z"));
  EntityBatch h;
  h.holidays = {CivilDate(2024, 1, 8)};
  store.ingest(h);
  EXPECT_EQ(store.snapshot()->tasks.find("m1:jld-referral:1")->anticipated_due_at, at("2024-01-05T20:00:00Z"));
}

TEST(StoreTest, ValidateIsCompareAndSet) {
  Store store{fixtures::reference_config()};
  store.ingest(fixtures::reference_batch());
  auto sub = store.events().subscribe();
  const auto done = store.validate("m1:jld-referral:1", {"administrative"}, at("2024-01-05T10:00:00Z"));
  EXPECT_EQ(done.revision, 2u);
  EXPECT_EQ(done.task.status, TaskStatus::kCompleted);
  EXPECT_EQ(done.task.completed_by, Profession{"administrative"});
  const auto ev = sub->next(std::chrono::milliseconds(100));
  ASSERT_TRUE(ev);
  EXPECT_EQ(*ev, (ChangeEvent{"task-validated", "m1:jld-referral:1", 2}));

  try {
    store.validate("m1:jld-referral:1", {"administrative"}, at("2024-01-05T11:00:00Z"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlreadyCompleted);
  }
  EXPECT_EQ(store.snapshot()->revision, 2u);
  EXPECT_THROW(store.validate("nope", {"administrative"}, at("2024-01-05T11:00:00Z")), Error);
  EXPECT_THROW(store.validate("m1:jld-referral:1", {"astronaut"}, at("2024-01-05T11:00:00Z")), Error);
}

TEST(StoreTest, CompletionSurvivesReingest) {
  Store store{fixtures::reference_config()};
  store.ingest(fixtures::reference_batch());
  store.validate("m1:jld-referral:1", {"administrative"}, at("2024-01-05T10:00:00Z"));
  store.ingest(fixtures::reference_batch());
  EXPECT_EQ(store.snapshot()->tasks.find("m1:jld-referral:1")->status, TaskStatus::kCompleted);
}

TEST(StoreTest, RevisionsIncreaseByOne) {
  Store store{ServiceConfig{}};
  auto sub = store.events().subscribe();
  for (int i = 0; i < 5; ++i) store.ingest({});
  std::uint64_t last = 0;
  for (int i = 0; i < 5; ++i) {
    const auto ev = sub->next(std::chrono::milliseconds(100));
    ASSERT_TRUE(ev);
    EXPECT_EQ(ev->revision, last + 1);
    last = ev->revision;
  }
}

TEST(StoreTest, PersistsAndReloads) {
  fixtures::TempDir dir;
  {
    Store store(fixtures::reference_config(), dir.path());
    store.ingest(fixtures::demo_batch());
    store.ingest(fixtures::reference_batch());
    store.validate("m1:jld-referral:1", {"administrative"}, at("2024-01-05T10:00:00.5Z"));
  }
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "store.json"));
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "store.json.tmp"));
  Store reloaded(fixtures::reference_config(), dir.path());
  const auto s = reloaded.snapshot();
  EXPECT_EQ(s->revision, 3u);
  EXPECT_EQ(s->patients.size(), 4u);
  EXPECT_EQ(s->observations.size(), fixtures::demo_batch().observations.size());
  EXPECT_EQ(s->holidays.size(), 5u);
  EXPECT_EQ(s->tasks.find("m1:jld-referral:1")->completed_at, at("2024-01-05T10:00:00.5Z"));
  EXPECT_EQ(reloaded.ingest({}).revision, 4u);
}

TEST(StoreTest, CorruptSnapshotIsIoError) {
  fixtures::TempDir dir;
  std::ofstream(dir.path() / "store.json") << "{ truncated";
  try {
    Store store(ServiceConfig{}, dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace cliniline
