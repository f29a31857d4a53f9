#include <gtest/gtest.h>

#include <limits>

#include "cliniline/core/entities.hpp"
#include "support/fixtures.hpp"

namespace cliniline {
namespace {

using fixtures::at;

EntityBatch small_batch() {
  EntityBatch b;
  b.units = {{"u1", "Unit A"}};
  b.patients = {{"p1", "Jane Doe", "u1"}};
  b.measures = {{"m1", "p1", MeasureKind::kIsolation, at("2024-01-05T20:00:00Z"), std::nullopt}};
  return b;
}

TEST(ValidateEntityGraphTest, EmptyBatchGivesEmptyReport) {
  EXPECT_TRUE(validate_entity_graph(EntityBatch{}).empty());
}

TEST(ValidateEntityGraphTest, ConsistentBatchAccepted) {
  EXPECT_TRUE(validate_entity_graph(small_batch()).empty());
}

TEST(ValidateEntityGraphTest, MeasureWithUnknownPatient) {
  auto b = small_batch();
  b.measures.push_back({"m2", "p9", MeasureKind::kRestraint, at("2024-01-05T20:00:00Z"), {}});
  const auto report = validate_entity_graph(b);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report.issues[0].kind, IssueKind::kDanglingReference);
  EXPECT_EQ(report.issues[0].entity_id, "m2");
}

TEST(ValidateEntityGraphTest, DuplicatePatientIdReportedOnce) {
  auto b = small_batch();
  b.patients.push_back({"p1", "John Doe", "u1"});
  const auto report = validate_entity_graph(b);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report.issues[0].kind, IssueKind::kDuplicateId);
  EXPECT_EQ(report.issues[0].entity_id, "p1");
}

TEST(ValidateEntityGraphTest, PatientWithUnknownUnit) {
  auto b = small_batch();
  b.patients[0].unit_id = "u7";
  EXPECT_EQ(validate_entity_graph(b).count(IssueKind::kDanglingReference), 1u);
}

TEST(ValidateEntityGraphTest, ReferencesResolveAgainstKnownIds) {
  EntityBatch b;
  b.measures = {{"m1", "p1", MeasureKind::kIsolation, at("2024-01-05T20:00:00Z"), {}}};
  EXPECT_EQ(validate_entity_graph(b).size(), 1u);
  ReferenceContext known;
  known.patient_ids = {"p1"};
  EXPECT_TRUE(validate_entity_graph(b, known).empty());
}

TEST(ValidateEntityGraphTest, IntervalAndValueViolations) {
  auto b = small_batch();
  b.measures[0].end_at = b.measures[0].start_at;  // must be strictly after
  b.prescriptions = {{"rx1", "p1", "amoxicillin", at("2024-01-02T00:00:00Z"),
                      at("2024-01-02T00:00:00Z")}};  // equal bounds allowed
  b.micro_events = {{"me1", "p1", "blood culture", at("2024-01-03T00:00:00Z"),
                     at("2024-01-02T00:00:00Z"), std::nullopt}};
  b.observations = {{"o1", "p1", "temperature", std::numeric_limits<double>::infinity(), "C",
                     at("2024-01-02T00:00:00Z"), Theme::kEfficacy}};
  b.annotations = {{"a1", "p1", "", at("2024-01-02T00:00:00Z"), {"nurse"}, Theme::kTolerance}};
  const auto report = validate_entity_graph(b);
  EXPECT_EQ(report.count(IssueKind::kIntervalViolation), 2u);
  EXPECT_EQ(report.count(IssueKind::kInvalidValue), 2u);
  EXPECT_EQ(report.size(), 4u);
}

TEST(ValidateEntityGraphTest, UnknownAuthorProfession) {
  auto b = small_batch();
  b.annotations = {{"a1", "p1", "note", at("2024-01-02T00:00:00Z"), {"plumber"}, Theme::kEfficacy}};
  ReferenceContext known;
  EXPECT_TRUE(validate_entity_graph(b, known).empty());
  known.professions = std::set<std::string>{"nurse", "physician"};
  EXPECT_EQ(validate_entity_graph(b, known).count(IssueKind::kUnknownProfession), 1u);
}

TEST(ThemeTest, OrderAndSpelling) {
  ASSERT_EQ(kThemes.size(), 4u);
  EXPECT_EQ(to_string(kThemes[0]), "therapeutics");
  EXPECT_EQ(to_string(kThemes[1]), "efficacy");
  EXPECT_EQ(to_string(kThemes[2]), "microbiology");
  EXPECT_EQ(to_string(kThemes[3]), "tolerance");
  for (Theme t : kThemes) EXPECT_EQ(parse_theme(to_string(t)), t);
}

}  // namespace
}  // namespace cliniline
