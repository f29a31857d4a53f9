#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cliniline/core/error.hpp"
#include "cliniline/core/time.hpp"

namespace cliniline {

/// A job code from the configured vocabulary (physician, nurse, ...).
struct Profession {
  std::string code;

  auto operator<=>(const Profession&) const = default;
};

struct Unit {
  std::string id;
  std::string name;

  bool operator==(const Unit&) const = default;
};

struct Patient {
  std::string id;
  std::string display_name;
  std::string unit_id;

  bool operator==(const Patient&) const = default;
};

enum class MeasureKind { kIsolation, kRestraint };

struct SeclusionMeasure {
  std::string id;
  std::string patient_id;
  MeasureKind kind = MeasureKind::kIsolation;
  Instant start_at{};
  std::optional<Instant> end_at;

  bool operator==(const SeclusionMeasure&) const = default;
};

struct PrescriptionCourse {
  std::string id;
  std::string patient_id;
  std::string drug_label;
  Instant start_at{};
  std::optional<Instant> end_at;

  bool operator==(const PrescriptionCourse&) const = default;
};

// Declaration order is rendering order.
enum class Theme { kTherapeutics, kEfficacy, kMicrobiology, kTolerance };

inline constexpr std::array<Theme, 4> kThemes = {
    Theme::kTherapeutics, Theme::kEfficacy, Theme::kMicrobiology, Theme::kTolerance};

struct Observation {
  std::string id;
  std::string patient_id;
  std::string code;
  double value = 0.0;
  std::string unit;
  Instant at{};
  Theme theme = Theme::kEfficacy;

  bool operator==(const Observation&) const = default;
};

struct MicroEvent {
  std::string id;
  std::string patient_id;
  std::string label;
  Instant sampled_at{};
  std::optional<Instant> result_at;
  std::optional<std::string> organism;

  bool operator==(const MicroEvent&) const = default;
};

struct Annotation {
  std::string id;
  std::string patient_id;
  std::string text;
  Instant at{};
  Profession author_role;
  // Lane the note is drawn in on the anti-infective dashboard.
  Theme theme = Theme::kTherapeutics;

  bool operator==(const Annotation&) const = default;
};

struct EntityBatch {
  std::vector<Patient> patients;
  std::vector<Unit> units;
  std::vector<SeclusionMeasure> measures;
  std::vector<PrescriptionCourse> prescriptions;
  std::vector<Observation> observations;
  std::vector<MicroEvent> micro_events;
  std::vector<Annotation> annotations;
  std::vector<CivilDate> holidays;

  bool operator==(const EntityBatch&) const = default;
};

// ---------------------------------------------------------------------------
// Enum spellings shared by the wire format and the CLI.

inline std::string_view to_string(MeasureKind k) {
  return k == MeasureKind::kIsolation ? "isolation" : "restraint";
}

inline MeasureKind parse_measure_kind(std::string_view s) {
  if (s == "isolation") return MeasureKind::kIsolation;
  if (s == "restraint") return MeasureKind::kRestraint;
  throw Error(ErrorCode::kParse, "unknown measure kind '" + std::string(s) + "'");
}

inline std::string_view to_string(Theme t) {
  switch (t) {
    case Theme::kTherapeutics: return "therapeutics";
    case Theme::kEfficacy: return "efficacy";
    case Theme::kMicrobiology: return "microbiology";
    case Theme::kTolerance: return "tolerance";
  }
  return "therapeutics";
}

inline Theme parse_theme(std::string_view s) {
  for (Theme t : kThemes) {
    if (to_string(t) == s) return t;
  }
  throw Error(ErrorCode::kParse, "unknown theme '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Batch validation

enum class IssueKind {
  kDanglingReference,
  kDuplicateId,
  kIntervalViolation,
  kInvalidValue,
  kUnknownProfession,
};

inline std::string_view to_string(IssueKind k) {
  switch (k) {
    case IssueKind::kDanglingReference: return "dangling-reference";
    case IssueKind::kDuplicateId: return "duplicate-id";
    case IssueKind::kIntervalViolation: return "interval-violation";
    case IssueKind::kInvalidValue: return "invalid-value";
    case IssueKind::kUnknownProfession: return "unknown-profession";
  }
  return "invalid-value";
}

struct ValidationIssue {
  IssueKind kind;
  std::string entity_type;
  std::string entity_id;
  std::string detail;

  bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool empty() const { return issues.empty(); }
  std::size_t size() const { return issues.size(); }
  std::size_t count(IssueKind kind) const {
    std::size_t n = 0;
    for (const auto& i : issues) n += i.kind == kind ? 1 : 0;
    return n;
  }
};

/// Identifiers already known outside the batch (e.g. previously ingested).
/// When `professions` is set, annotation author roles must belong to it.
struct ReferenceContext {
  std::set<std::string> patient_ids;
  std::set<std::string> unit_ids;
  std::optional<std::set<std::string>> professions;
};

namespace detail {

template <typename T>
void check_duplicates(const std::vector<T>& items, std::string_view type,
                      ValidationReport& report) {
  std::map<std::string, int> seen;
  for (const auto& item : items) ++seen[item.id];
  for (const auto& [id, n] : seen) {
    if (n > 1) {
      report.issues.push_back({IssueKind::kDuplicateId, std::string(type), id,
                               std::to_string(n) + " records share this id"});
    }
  }
}

}  // namespace detail

/// Lists dangling references, duplicate ids and interval violations. The batch
/// is acceptable iff the report is empty.
inline ValidationReport validate_entity_graph(const EntityBatch& batch,
                                              const ReferenceContext& known = {}) {
  ValidationReport report;

  detail::check_duplicates(batch.units, "unit", report);
  detail::check_duplicates(batch.patients, "patient", report);
  detail::check_duplicates(batch.measures, "measure", report);
  detail::check_duplicates(batch.prescriptions, "prescription", report);
  detail::check_duplicates(batch.observations, "observation", report);
  detail::check_duplicates(batch.micro_events, "microEvent", report);
  detail::check_duplicates(batch.annotations, "annotation", report);

  std::set<std::string> units = known.unit_ids;
  for (const auto& u : batch.units) units.insert(u.id);
  std::set<std::string> patients = known.patient_ids;
  for (const auto& p : batch.patients) patients.insert(p.id);

  auto dangling = [&](std::string_view type, const std::string& id,
                      std::string_view target, const std::string& ref) {
    report.issues.push_back({IssueKind::kDanglingReference, std::string(type), id,
                             "unknown " + std::string(target) + " '" + ref + "'"});
  };
  auto check_patient = [&](std::string_view type, const auto& e) {
    if (!patients.contains(e.patient_id)) dangling(type, e.id, "patient", e.patient_id);
  };

  for (const auto& p : batch.patients) {
    if (!units.contains(p.unit_id)) dangling("patient", p.id, "unit", p.unit_id);
  }
  for (const auto& m : batch.measures) {
    check_patient("measure", m);
    if (m.end_at && *m.end_at <= m.start_at) {
      report.issues.push_back({IssueKind::kIntervalViolation, "measure", m.id,
                               "endAt must be after startAt"});
    }
  }
  for (const auto& rx : batch.prescriptions) {
    check_patient("prescription", rx);
    if (rx.end_at && *rx.end_at < rx.start_at) {
      report.issues.push_back({IssueKind::kIntervalViolation, "prescription", rx.id,
                               "endAt must not precede startAt"});
    }
  }
  for (const auto& o : batch.observations) {
    check_patient("observation", o);
    if (!std::isfinite(o.value)) {
      report.issues.push_back(
          {IssueKind::kInvalidValue, "observation", o.id, "value must be finite"});
    }
  }
  for (const auto& ev : batch.micro_events) {
    check_patient("microEvent", ev);
    if (ev.result_at && *ev.result_at < ev.sampled_at) {
      report.issues.push_back({IssueKind::kIntervalViolation, "microEvent", ev.id,
                               "resultAt must not precede sampledAt"});
    }
  }
  for (const auto& a : batch.annotations) {
    check_patient("annotation", a);
    if (a.text.empty()) {
      report.issues.push_back(
          {IssueKind::kInvalidValue, "annotation", a.id, "text must not be empty"});
    }
    if (known.professions && !known.professions->contains(a.author_role.code)) {
      report.issues.push_back({IssueKind::kUnknownProfession, "annotation", a.id,
                               "unknown profession '" + a.author_role.code + "'"});
    }
  }
  for (const auto& d : batch.holidays) {
    if (!is_supported(d)) {
      report.issues.push_back({IssueKind::kInvalidValue, "holiday", format_date(d),
                               "holiday outside 1970-2100"});
    }
  }
  return report;
}

}  // namespace cliniline
