#pragma once

// JSON wire format. Timestamps travel as RFC 3339 strings and are normalized
// to UTC on the way in; calendar dates as YYYY-MM-DD.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "cliniline/core/entities.hpp"
#include "cliniline/core/error.hpp"
#include "cliniline/core/time.hpp"
#include "cliniline/deadline/engine.hpp"
#include "cliniline/timeline/items.hpp"
#include "cliniline/timeline/series.hpp"
#include "cliniline/timeline/sync.hpp"

namespace cliniline::wire {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Field readers

namespace detail {

inline const Json& field(const Json& obj, const char* key, const char* type) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::kParse, std::string(type) + ": missing '" + key + "'");
  }
  return obj[key];
}

inline std::string str(const Json& obj, const char* key, const char* type) {
  const auto& v = field(obj, key, type);
  if (!v.is_string()) throw Error(ErrorCode::kParse, std::string(type) + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

inline std::optional<std::string> opt_str(const Json& obj, const char* key, const char* type) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  return str(obj, key, type);
}

inline Instant instant(const Json& obj, const char* key, const char* type) {
  return parse_instant(str(obj, key, type));
}

inline std::optional<Instant> opt_instant(const Json& obj, const char* key, const char* type) {
  auto s = opt_str(obj, key, type);
  return s ? std::optional<Instant>(parse_instant(*s)) : std::nullopt;
}

inline Json opt(const std::optional<Instant>& t) {
  return t ? Json(format_instant(*t)) : Json(nullptr);
}

template <typename T, typename F>
std::vector<T> list(const Json& doc, const char* key, F parse) {
  std::vector<T> out;
  if (!doc.contains(key) || doc[key].is_null()) return out;
  if (!doc[key].is_array()) throw Error(ErrorCode::kParse, std::string("'") + key + "' must be an array");
  for (const auto& e : doc[key]) out.push_back(parse(e));
  return out;
}

}  // namespace detail

inline Json to_json(const TimelineItem& item);
inline Json to_json(const ClinicalSeries& s);
inline Json to_json(const TaskInstance& t);
inline Json to_json(const DashboardComponent& c);

// ---------------------------------------------------------------------------
// Entities

inline Json to_json(const Unit& u) { return {{"id", u.id}, {"name", u.name}}; }
inline Json to_json(const Patient& p) {
  return {{"id", p.id}, {"displayName", p.display_name}, {"unitId", p.unit_id}};
}
inline Json to_json(const SeclusionMeasure& m) {
  return {{"id", m.id}, {"patientId", m.patient_id}, {"kind", to_string(m.kind)},
          {"startAt", format_instant(m.start_at)}, {"endAt", detail::opt(m.end_at)}};
}
inline Json to_json(const PrescriptionCourse& rx) {
  return {{"id", rx.id}, {"patientId", rx.patient_id}, {"drugLabel", rx.drug_label},
          {"startAt", format_instant(rx.start_at)}, {"endAt", detail::opt(rx.end_at)}};
}
inline Json to_json(const Observation& o) {
  return {{"id", o.id}, {"patientId", o.patient_id}, {"code", o.code}, {"value", o.value},
          {"unit", o.unit}, {"at", format_instant(o.at)}, {"theme", to_string(o.theme)}};
}
inline Json to_json(const MicroEvent& e) {
  return {{"id", e.id}, {"patientId", e.patient_id}, {"label", e.label},
          {"sampledAt", format_instant(e.sampled_at)}, {"resultAt", detail::opt(e.result_at)},
          {"organism", e.organism ? Json(*e.organism) : Json(nullptr)}};
}
inline Json to_json(const Annotation& a) {
  return {{"id", a.id}, {"patientId", a.patient_id}, {"text", a.text},
          {"at", format_instant(a.at)}, {"authorRole", a.author_role.code},
          {"theme", to_string(a.theme)}};
}

inline Unit unit_from_json(const Json& j) {
  return {detail::str(j, "id", "unit"), detail::str(j, "name", "unit")};
}
inline Patient patient_from_json(const Json& j) {
  return {detail::str(j, "id", "patient"), detail::str(j, "displayName", "patient"),
          detail::str(j, "unitId", "patient")};
}
inline SeclusionMeasure measure_from_json(const Json& j) {
  return {detail::str(j, "id", "measure"), detail::str(j, "patientId", "measure"),
          parse_measure_kind(detail::str(j, "kind", "measure")),
          detail::instant(j, "startAt", "measure"), detail::opt_instant(j, "endAt", "measure")};
}
inline PrescriptionCourse prescription_from_json(const Json& j) {
  return {detail::str(j, "id", "prescription"), detail::str(j, "patientId", "prescription"),
          detail::str(j, "drugLabel", "prescription"),
          detail::instant(j, "startAt", "prescription"),
          detail::opt_instant(j, "endAt", "prescription")};
}
inline Observation observation_from_json(const Json& j) {
  const auto& v = detail::field(j, "value", "observation");
  if (!v.is_number()) throw Error(ErrorCode::kParse, "observation: 'value' must be a number");
  return {detail::str(j, "id", "observation"), detail::str(j, "patientId", "observation"),
          detail::str(j, "code", "observation"), v.get<double>(),
          detail::str(j, "unit", "observation"), detail::instant(j, "at", "observation"),
          parse_theme(detail::str(j, "theme", "observation"))};
}
inline MicroEvent micro_event_from_json(const Json& j) {
  return {detail::str(j, "id", "microEvent"), detail::str(j, "patientId", "microEvent"),
          detail::str(j, "label", "microEvent"), detail::instant(j, "sampledAt", "microEvent"),
          detail::opt_instant(j, "resultAt", "microEvent"),
          detail::opt_str(j, "organism", "microEvent")};
}
inline Annotation annotation_from_json(const Json& j) {
  const auto theme = detail::opt_str(j, "theme", "annotation");
  return {detail::str(j, "id", "annotation"), detail::str(j, "patientId", "annotation"),
          detail::str(j, "text", "annotation"), detail::instant(j, "at", "annotation"),
          {detail::str(j, "authorRole", "annotation")},
          theme ? parse_theme(*theme) : Theme::kTherapeutics};
}

/// Parses an ingestion document. Absent collections are empty.
inline EntityBatch batch_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "ingestion document must be an object");
  EntityBatch b;
  b.patients = detail::list<Patient>(doc, "patients", patient_from_json);
  b.units = detail::list<Unit>(doc, "units", unit_from_json);
  b.measures = detail::list<SeclusionMeasure>(doc, "measures", measure_from_json);
  b.prescriptions = detail::list<PrescriptionCourse>(doc, "prescriptions", prescription_from_json);
  b.observations = detail::list<Observation>(doc, "observations", observation_from_json);
  b.micro_events = detail::list<MicroEvent>(doc, "microEvents", micro_event_from_json);
  b.annotations = detail::list<Annotation>(doc, "annotations", annotation_from_json);
  b.holidays = detail::list<CivilDate>(doc, "holidays", [](const Json& d) {
    if (!d.is_string()) throw Error(ErrorCode::kParse, "holidays must be date strings");
    return parse_date(d.get<std::string>());
  });
  return b;
}

inline EntityBatch parse_batch(const std::string& text) {
  try {
    return batch_from_json(Json::parse(text));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("invalid JSON: ") + e.what());
  }
}

template <typename T>
Json array_of(const std::vector<T>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(to_json(x));
  return out;
}

inline Json to_json(const EntityBatch& b) {
  Json holidays = Json::array();
  for (const auto& d : b.holidays) holidays.push_back(format_date(d));
  return {{"patients", array_of(b.patients)},         {"units", array_of(b.units)},
          {"measures", array_of(b.measures)},         {"prescriptions", array_of(b.prescriptions)},
          {"observations", array_of(b.observations)}, {"microEvents", array_of(b.micro_events)},
          {"annotations", array_of(b.annotations)},   {"holidays", holidays}};
}

inline Json to_json(const ValidationReport& r) {
  Json issues = Json::array();
  for (const auto& i : r.issues) {
    issues.push_back({{"kind", to_string(i.kind)}, {"entityType", i.entity_type},
                      {"entityId", i.entity_id}, {"detail", i.detail}});
  }
  return {{"issues", issues}};
}

// ---------------------------------------------------------------------------
// Tasks

inline Json to_json(const TaskInstance& t) {
  return {{"id", t.id},
          {"ruleId", t.rule_id},
          {"measureId", t.measure_id},
          {"patientId", t.patient_id},
          {"unitId", t.unit_id},
          {"label", t.label},
          {"profession", t.profession.code},
          {"sequence", t.sequence},
          {"dueAt", format_instant(t.due_at)},
          {"anticipatedDueAt", format_instant(t.anticipated_due_at)},
          {"status", to_string(t.status)},
          {"completedAt", detail::opt(t.completed_at)},
          {"completedBy", t.completed_by ? Json(t.completed_by->code) : Json(nullptr)}};
}

inline TaskInstance task_from_json(const Json& j) {
  TaskInstance t;
  t.id = detail::str(j, "id", "task");
  t.rule_id = detail::str(j, "ruleId", "task");
  t.measure_id = detail::str(j, "measureId", "task");
  t.patient_id = detail::str(j, "patientId", "task");
  t.unit_id = detail::str(j, "unitId", "task");
  t.label = detail::str(j, "label", "task");
  t.profession = {detail::str(j, "profession", "task")};
  t.sequence = detail::field(j, "sequence", "task").get<int>();
  t.due_at = detail::instant(j, "dueAt", "task");
  t.anticipated_due_at = detail::instant(j, "anticipatedDueAt", "task");
  t.status = parse_task_status(detail::str(j, "status", "task"));
  t.completed_at = detail::opt_instant(j, "completedAt", "task");
  if (auto by = detail::opt_str(j, "completedBy", "task")) t.completed_by = Profession{*by};
  return t;
}

// ---------------------------------------------------------------------------
// Timeline model

inline Json to_json(const TimeRange& r) {
  return {{"start", format_instant(r.start)}, {"end", format_instant(r.end)}};
}

inline Json to_json(const Viewport& v) {
  return {{"start", format_instant(v.start())}, {"end", format_instant(v.end())}};
}

inline Json to_json(const TimelineItem& item) {
  Json tooltip = Json::array();
  for (const auto& [k, v] : item.tooltip) tooltip.push_back({{"key", k}, {"value", v}});
  return {{"id", item.id},
          {"componentId", item.component_id},
          {"group", item.group},
          {"kind", to_string(item.kind)},
          {"start", format_instant(item.start)},
          {"end", detail::opt(item.end)},
          {"label", item.label},
          {"colorToken", to_string(item.color)},
          {"tooltip", tooltip},
          {"payloadRef", item.payload_ref ? Json(*item.payload_ref) : Json(nullptr)},
          {"validatable", item.validatable}};
}

inline Json to_json(const NumericSeries& s) {
  Json points = Json::array();
  for (const auto& p : s.points) {
    points.push_back({{"t", format_instant(p.at)}, {"value", p.value}, {"sourceId", p.source_id}});
  }
  return {{"type", "numeric"}, {"id", s.id}, {"label", s.label}, {"unit", s.unit}, {"points", points}};
}

inline Json to_json(const IntervalSet& s) {
  Json intervals = Json::array();
  for (const auto& i : s.intervals) {
    intervals.push_back({{"start", format_instant(i.start)}, {"end", format_instant(i.end)},
                         {"label", i.label}, {"sourceId", i.source_id}, {"clipped", i.clipped}});
  }
  return {{"type", "intervals"}, {"id", s.id}, {"label", s.label}, {"intervals", intervals}};
}

inline Json to_json(const EventSet& s) {
  Json events = Json::array();
  for (const auto& e : s.events) {
    events.push_back({{"t", format_instant(e.at)}, {"label", e.label}, {"sourceId", e.source_id}});
  }
  return {{"type", "events"}, {"id", s.id}, {"label", s.label}, {"events", events}};
}

inline Json to_json(const ClinicalSeries& s) {
  return std::visit([](const auto& v) { return to_json(v); }, s);
}

inline Json to_json(const DashboardComponent& c) {
  Json labels = Json::object();
  for (const auto& l : c.lanes) labels[l.id] = l.label;
  Json out = {{"id", c.id},
              {"title", c.title},
              {"kind", to_string(c.kind)},
              {"theme", c.theme ? Json(to_string(*c.theme)) : Json(nullptr)},
              {"groupLabels", labels}};
  if (c.kind == ComponentKind::kTimeline) {
    out["items"] = array_of(c.items);
  } else {
    out["series"] = array_of(c.series);
  }
  return out;
}

}  // namespace cliniline::wire
