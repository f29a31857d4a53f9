#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cliniline/calendar/business_calendar.hpp"
#include "cliniline/core/entities.hpp"
#include "cliniline/core/error.hpp"
#include "cliniline/deadline/engine.hpp"
#include "cliniline/service/config.hpp"
#include "cliniline/service/store.hpp"
#include "cliniline/service/wire.hpp"
#include "cliniline/timeline/items.hpp"
#include "cliniline/timeline/series.hpp"
#include "cliniline/timeline/sync.hpp"
#include "cliniline/timeline/viewport.hpp"

namespace cliniline {

enum class ScopeKind { kPatient, kUnit, kEstablishment };

inline std::string_view to_string(ScopeKind k) {
  switch (k) {
    case ScopeKind::kPatient: return "patient";
    case ScopeKind::kUnit: return "unit";
    case ScopeKind::kEstablishment: return "establishment";
  }
  return "patient";
}

struct DashboardScope {
  ScopeKind kind = ScopeKind::kEstablishment;
  std::string id;  // empty for establishment

  static DashboardScope patient(std::string id) { return {ScopeKind::kPatient, std::move(id)}; }
  static DashboardScope unit(std::string id) { return {ScopeKind::kUnit, std::move(id)}; }
  static DashboardScope establishment() { return {ScopeKind::kEstablishment, {}}; }

  bool operator==(const DashboardScope&) const = default;
};

enum class DashboardView { kIsopsy, kAtbviz };

inline std::string_view to_string(DashboardView v) {
  return v == DashboardView::kIsopsy ? "isopsy" : "atbviz";
}

inline DashboardView parse_dashboard_view(std::string_view s) {
  if (s == "isopsy") return DashboardView::kIsopsy;
  if (s == "atbviz") return DashboardView::kAtbviz;
  throw Error(ErrorCode::kInvalidView, "unknown view '" + std::string(s) + "'");
}

struct DashboardOptions {
  bool use_anticipated = false;
  std::optional<Profession> profession;

  bool operator==(const DashboardOptions&) const = default;
};

struct DashboardDoc {
  std::string dashboard_id;
  DashboardScope scope;
  DashboardView view = DashboardView::kIsopsy;
  Instant as_of{};
  DashboardOptions options;
  Viewport viewport{Instant{}, Instant{} + Duration{1}};
  std::vector<DashboardComponent> components;
  std::vector<TimeRange> background_bands;

  bool operator==(const DashboardDoc&) const = default;
};

inline std::string dashboard_id(const DashboardScope& scope, DashboardView view) {
  std::string id = std::string(to_string(view)) + "." + std::string(to_string(scope.kind));
  if (scope.kind != ScopeKind::kEstablishment) id += "." + scope.id;
  return id;
}

namespace detail {

inline void add_band_items(DashboardComponent& c, const std::vector<TimeRange>& bands) {
  for (std::size_t i = 0; i < bands.size(); ++i) {
    TimelineItem band;
    band.id = c.id + ":band:" + std::to_string(i);
    band.component_id = c.id;
    band.group = "background";  // spans every lane
    band.kind = ItemKind::kBackground;
    band.start = bands[i].start;
    band.end = bands[i].end;
    band.label = "Non-business day";
    band.color = ColorToken::kBandGrey;
    c.items.push_back(std::move(band));
  }
}

inline std::vector<const Patient*> patients_in_scope(const StoreState& s, const DashboardScope& scope) {
  std::vector<const Patient*> out;
  switch (scope.kind) {
    case ScopeKind::kPatient: {
      const auto it = s.patients.find(scope.id);
      if (it == s.patients.end()) throw Error(ErrorCode::kNotFound, "unknown patient '" + scope.id + "'");
      out.push_back(&it->second);
      break;
    }
    case ScopeKind::kUnit:
      if (!s.units.contains(scope.id)) throw Error(ErrorCode::kNotFound, "unknown unit '" + scope.id + "'");
      for (const auto& [id, p] : s.patients) {
        if (p.unit_id == scope.id) out.push_back(&p);
      }
      break;
    case ScopeKind::kEstablishment:
      for (const auto& [id, p] : s.patients) out.push_back(&p);
      std::stable_sort(out.begin(), out.end(), [](const Patient* a, const Patient* b) {
        return std::tie(a->unit_id, a->id) < std::tie(b->unit_id, b->id);
      });
      break;
  }
  return out;
}

inline std::string unit_name(const StoreState& s, const std::string& unit_id) {
  const auto it = s.units.find(unit_id);
  return it == s.units.end() ? unit_id : it->second.name;
}

inline DashboardComponent isopsy_component(const StoreState& s, const ServiceConfig& cfg,
                                           const DashboardScope& scope, Instant as_of,
                                           const DashboardOptions& opts) {
  DashboardComponent c;
  c.id = "isopsy-tasks";
  c.title = "Seclusion follow-up";
  c.kind = ComponentKind::kTimeline;

  const auto patients = patients_in_scope(s, scope);
  std::map<std::string, const Patient*> by_id;
  for (const Patient* p : patients) by_id.emplace(p->id, p);

  if (scope.kind == ScopeKind::kPatient) {
    for (const auto& rule : cfg.rule_set.rules) c.lanes.push_back({rule.id, rule.label});
  } else {
    for (const Patient* p : patients) {
      std::string label = p->display_name;
      if (scope.kind == ScopeKind::kEstablishment) label += " (" + unit_name(s, p->unit_id) + ")";
      c.lanes.push_back({p->id, label});
    }
  }

  std::vector<const TaskInstance*> tasks;
  for (const auto& [id, t] : s.tasks.all()) {
    if (by_id.contains(t.patient_id)) tasks.push_back(&t);
  }
  std::stable_sort(tasks.begin(), tasks.end(), [&](const TaskInstance* a, const TaskInstance* b) {
    return std::make_tuple(a->effective_due(opts.use_anticipated), std::cref(a->id)) <
           std::make_tuple(b->effective_due(opts.use_anticipated), std::cref(b->id));
  });

  std::vector<TimelineItem> items;
  for (const TaskInstance* t : tasks) {
    TimelineItem item = task_to_item(*t, as_of, cfg.thresholds, opts.use_anticipated);
    item.component_id = c.id;
    if (scope.kind != ScopeKind::kPatient) {
      const Patient& p = *by_id.at(t->patient_id);
      item.group = p.id;
      item.tooltip.emplace_back("Patient", p.display_name);
      if (scope.kind == ScopeKind::kEstablishment) item.tooltip.emplace_back("Unit", unit_name(s, p.unit_id));
    }
    items.push_back(std::move(item));
  }
  c.items = filter_items(items, opts.profession, s.tasks.all());
  return c;
}

inline TimelineItem annotation_item(const Annotation& a, const std::string& component_id) {
  TimelineItem item;
  item.id = a.id;
  item.component_id = component_id;
  item.group = "annotations";
  item.kind = ItemKind::kPoint;
  item.start = a.at;
  item.label = a.text;
  item.tooltip = {{"Note", a.text}, {"Author", a.author_role.code}, {"At", format_instant(a.at)}};
  item.payload_ref = a.id;
  return item;
}

inline std::vector<const Annotation*> annotations_for(const StoreState& s, const std::string& patient_id,
                                                      Theme theme) {
  std::vector<const Annotation*> out;
  for (const auto& [id, a] : s.annotations) {
    if (a.patient_id == patient_id && a.theme == theme) out.push_back(&a);
  }
  std::stable_sort(out.begin(), out.end(), [](const Annotation* a, const Annotation* b) {
    return std::tie(a->at, a->id) < std::tie(b->at, b->id);
  });
  return out;
}

inline DashboardComponent therapeutics_component(const StoreState& s, const std::string& patient_id,
                                                 Instant as_of) {
  DashboardComponent c{"atbviz-therapeutics", "Therapeutics", ComponentKind::kTimeline,
                       Theme::kTherapeutics, {}, {}, {{"prescriptions", "Prescriptions"}}};
  std::vector<const PrescriptionCourse*> courses;
  for (const auto& [id, rx] : s.prescriptions) {
    if (rx.patient_id == patient_id) courses.push_back(&rx);
  }
  std::stable_sort(courses.begin(), courses.end(), [](const auto* a, const auto* b) {
    return std::tie(a->start_at, a->id) < std::tie(b->start_at, b->id);
  });
  for (const auto* rx : courses) {
    TimelineItem item;
    item.id = rx->id;
    item.component_id = c.id;
    item.group = "prescriptions";
    item.start = rx->start_at;
    // An open course runs up to the reference instant.
    const Instant end = rx->end_at.value_or(std::max(as_of, rx->start_at));
    if (end > rx->start_at) {
      item.kind = ItemKind::kRange;
      item.end = end;
    }
    item.label = rx->drug_label;
    item.tooltip = {{"Drug", rx->drug_label},
                    {"Start", format_instant(rx->start_at)},
                    {"End", rx->end_at ? format_instant(*rx->end_at) : "ongoing"}};
    item.payload_ref = rx->id;
    c.items.push_back(std::move(item));
  }
  const auto notes = annotations_for(s, patient_id, Theme::kTherapeutics);
  if (!notes.empty()) c.lanes.push_back({"annotations", "Annotations"});
  for (const auto* a : notes) c.items.push_back(annotation_item(*a, c.id));
  return c;
}

inline DashboardComponent microbiology_component(const StoreState& s, const std::string& patient_id) {
  DashboardComponent c{"atbviz-microbiology", "Microbiology", ComponentKind::kTimeline,
                       Theme::kMicrobiology, {}, {}, {{"samples", "Samples"}}};
  std::vector<const MicroEvent*> events;
  for (const auto& [id, e] : s.micro_events) {
    if (e.patient_id == patient_id) events.push_back(&e);
  }
  std::stable_sort(events.begin(), events.end(), [](const auto* a, const auto* b) {
    return std::tie(a->sampled_at, a->id) < std::tie(b->sampled_at, b->id);
  });
  for (const auto* e : events) {
    TimelineItem item;
    item.id = e->id;
    item.component_id = c.id;
    item.group = "samples";
    item.start = e->sampled_at;
    if (e->result_at && *e->result_at > e->sampled_at) {
      item.kind = ItemKind::kRange;
      item.end = e->result_at;
    }
    item.label = e->organism ? e->label + ": " + *e->organism : e->label;
    item.tooltip = {{"Sample", e->label},
                    {"Sampled", format_instant(e->sampled_at)},
                    {"Result", e->result_at ? format_instant(*e->result_at) : "pending"},
                    {"Organism", e->organism.value_or("none")}};
    item.payload_ref = e->id;
    c.items.push_back(std::move(item));
  }
  const auto notes = annotations_for(s, patient_id, Theme::kMicrobiology);
  if (!notes.empty()) c.lanes.push_back({"annotations", "Annotations"});
  for (const auto* a : notes) c.items.push_back(annotation_item(*a, c.id));
  return c;
}

inline DashboardComponent chart_component(const StoreState& s, const std::string& patient_id, Theme theme,
                                          std::string id, std::string title) {
  DashboardComponent c{std::move(id), std::move(title), ComponentKind::kNumericChart, theme, {}, {}, {}};
  std::map<std::string, NumericSeries> by_code;
  for (const auto& [oid, o] : s.observations) {
    if (o.patient_id != patient_id || o.theme != theme) continue;
    auto& series = by_code[o.code];
    if (series.id.empty()) series = {o.code, o.code, o.unit, {}};
    series.points.push_back({o.at, o.value, o.id});
  }
  for (auto& [code, series] : by_code) {
    std::stable_sort(series.points.begin(), series.points.end(), [](const auto& a, const auto& b) {
      return std::tie(a.at, a.source_id) < std::tie(b.at, b.source_id);
    });
    c.lanes.push_back({series.id, series.unit.empty() ? series.label : series.label + " (" + series.unit + ")"});
    c.series.emplace_back(std::move(series));
  }
  const auto notes = annotations_for(s, patient_id, theme);
  if (!notes.empty()) {
    EventSet events{"annotations", "Annotations", {}};
    for (const auto* a : notes) events.events.push_back({a->at, a->text, a->id});
    c.lanes.push_back({"annotations", "Annotations"});
    c.series.emplace_back(std::move(events));
  }
  return c;
}

}  // namespace detail

/// Builds the document a dashboard client renders. Pure in (snapshot, config,
/// scope, view, asOf, options).
inline DashboardDoc assemble_dashboard(const StoreState& s, const ServiceConfig& cfg,
                                       const DashboardScope& scope, DashboardView view, Instant as_of,
                                       const DashboardOptions& opts = {}) {
  if (view == DashboardView::kAtbviz && scope.kind != ScopeKind::kPatient) {
    throw Error(ErrorCode::kInvalidView, "atbviz is only available for a patient");
  }
  if (opts.profession && !cfg.profession_codes().contains(opts.profession->code)) {
    throw Error(ErrorCode::kBadRequest, "unknown profession '" + opts.profession->code + "'");
  }

  DashboardDoc doc;
  doc.dashboard_id = dashboard_id(scope, view);
  doc.scope = scope;
  doc.view = view;
  doc.as_of = as_of;
  doc.options = opts;
  const DashboardWindow w = view == DashboardView::kIsopsy ? cfg.isopsy_window : cfg.atbviz_window;
  doc.viewport = Viewport(as_of - w.before, as_of + w.after);

  const BusinessCalendar cal = cfg.calendar().with_holidays(s.holidays);
  doc.background_bands = non_business_bands(doc.viewport, cal);

  if (view == DashboardView::kIsopsy) {
    doc.components.push_back(detail::isopsy_component(s, cfg, scope, as_of, opts));
  } else {
    detail::patients_in_scope(s, scope);  // not-found check
    doc.components.push_back(detail::therapeutics_component(s, scope.id, as_of));
    doc.components.push_back(detail::chart_component(s, scope.id, Theme::kEfficacy, "atbviz-efficacy", "Efficacy"));
    doc.components.push_back(detail::microbiology_component(s, scope.id));
    doc.components.push_back(
        detail::chart_component(s, scope.id, Theme::kTolerance, "atbviz-tolerance", "Tolerance"));
  }
  for (auto& c : doc.components) {
    if (c.kind == ComponentKind::kTimeline) detail::add_band_items(c, doc.background_bands);
  }
  return doc;
}

/// Sync group binding every component of a document to its viewport.
inline SyncGroup sync_group_of(const DashboardDoc& doc, const ViewportLimits& limits = {}) {
  std::vector<std::string> ids;
  for (const auto& c : doc.components) ids.push_back(c.id);
  return SyncGroup(doc.dashboard_id, doc.viewport, std::move(ids), limits);
}

namespace wire {

inline Json to_json(const DashboardDoc& doc) {
  Json bands = Json::array();
  for (const auto& b : doc.background_bands) bands.push_back(to_json(b));
  return {{"dashboardId", doc.dashboard_id},
          {"scope",
           {{"kind", to_string(doc.scope.kind)},
            {"id", doc.scope.kind == ScopeKind::kEstablishment ? Json(nullptr) : Json(doc.scope.id)}}},
          {"view", to_string(doc.view)},
          {"asOf", format_instant(doc.as_of)},
          {"options",
           {{"useAnticipated", doc.options.use_anticipated},
            {"professionFilter", doc.options.profession ? Json(doc.options.profession->code) : Json(nullptr)}}},
          {"viewport", to_json(doc.viewport)},
          {"components", array_of(doc.components)},
          {"backgroundBands", bands}};
}

}  // namespace wire

}  // namespace cliniline
