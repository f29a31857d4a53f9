#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "cliniline/calendar/business_calendar.hpp"
#include "cliniline/core/entities.hpp"
#include "cliniline/deadline/engine.hpp"
#include "cliniline/deadline/task_ledger.hpp"
#include "cliniline/service/config.hpp"
#include "cliniline/service/events.hpp"
#include "cliniline/service/wire.hpp"

namespace cliniline {

/// Everything the service knows at one revision. Immutable once published.
struct StoreState {
  std::map<std::string, Unit> units;
  std::map<std::string, Patient> patients;
  std::map<std::string, SeclusionMeasure> measures;
  std::map<std::string, PrescriptionCourse> prescriptions;
  std::map<std::string, Observation> observations;
  std::map<std::string, MicroEvent> micro_events;
  std::map<std::string, Annotation> annotations;
  std::set<CivilDate> holidays;
  TaskLedger tasks;
  std::uint64_t revision = 0;
};

using Snapshot = std::shared_ptr<const StoreState>;

/// Ingest rejected by entity-graph validation.
class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(ValidationReport report)
      : Error(ErrorCode::kValidation,
              "batch rejected: " + std::to_string(report.size()) + " validation issue(s)"),
        report_(std::move(report)) {}

  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct ValidationOutcome {
  TaskInstance task;
  std::uint64_t revision = 0;
};

struct IngestSummary {
  std::string batch_id;
  std::uint64_t revision = 0;
  std::map<std::string, std::size_t> counts;
  std::size_t tasks_generated = 0;
};

namespace detail {

template <typename T>
void upsert(std::map<std::string, T>& into, const std::vector<T>& items) {
  for (const auto& item : items) into.insert_or_assign(item.id, item);
}

template <typename T>
Json map_to_json(const std::map<std::string, T>& m) {
  Json out = Json::array();
  for (const auto& [id, v] : m) out.push_back(wire::to_json(v));
  return out;
}

inline Json state_to_json(const StoreState& s) {
  Json holidays = Json::array();
  for (const auto& d : s.holidays) holidays.push_back(format_date(d));
  Json tasks = Json::array();
  for (const auto& [id, t] : s.tasks.all()) tasks.push_back(wire::to_json(t));
  return {{"format", "cliniline-store/1"},
          {"revision", s.revision},
          {"units", map_to_json(s.units)},
          {"patients", map_to_json(s.patients)},
          {"measures", map_to_json(s.measures)},
          {"prescriptions", map_to_json(s.prescriptions)},
          {"observations", map_to_json(s.observations)},
          {"microEvents", map_to_json(s.micro_events)},
          {"annotations", map_to_json(s.annotations)},
          {"holidays", holidays},
          {"tasks", tasks}};
}

inline StoreState state_from_json(const Json& doc) {
  const EntityBatch b = wire::batch_from_json(doc);
  StoreState s;
  upsert(s.units, b.units);
  upsert(s.patients, b.patients);
  upsert(s.measures, b.measures);
  upsert(s.prescriptions, b.prescriptions);
  upsert(s.observations, b.observations);
  upsert(s.micro_events, b.micro_events);
  upsert(s.annotations, b.annotations);
  s.holidays.insert(b.holidays.begin(), b.holidays.end());
  for (const auto& t : doc.at("tasks")) s.tasks.put(wire::task_from_json(t));
  s.revision = doc.at("revision").get<std::uint64_t>();
  return s;
}

}  // namespace detail

/// Entity and task store. Readers take immutable snapshots; mutations are
/// serialized, persisted as a whole-file snapshot (write + atomic rename) and
/// then published, and each bumps the revision by exactly one.
class Store {
 public:
  static constexpr const char* kSnapshotFile = "store.json";

  explicit Store(ServiceConfig config, std::optional<std::filesystem::path> data_dir = {})
      : config_(std::move(config)),
        base_calendar_(config_.calendar()),
        data_dir_(std::move(data_dir)),
        state_(std::make_shared<StoreState>()) {
    if (data_dir_) {
      std::filesystem::create_directories(*data_dir_);
      const auto file = *data_dir_ / kSnapshotFile;
      if (std::filesystem::exists(file)) {
        try {
          state_ = std::make_shared<StoreState>(
              detail::state_from_json(Json::parse(read_file(file))));
        } catch (const Json::exception& e) {
          throw Error(ErrorCode::kIo, "corrupt snapshot " + file.string() + ": " + e.what());
        }
      }
    }
    events_ = std::make_unique<EventHub>(state_->revision);
  }

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  const ServiceConfig& config() const { return config_; }
  EventHub& events() { return *events_; }

  Snapshot snapshot() const {
    std::lock_guard lock(snapshot_mu_);
    return state_;
  }

  /// Configured calendar plus the ingested holidays of a snapshot.
  BusinessCalendar calendar(const StoreState& s) const { return base_calendar_.with_holidays(s.holidays); }

  /// All-or-nothing upsert of a batch; tasks of affected measures are
  /// regenerated (completion state survives when a task id persists).
  IngestSummary ingest(const EntityBatch& batch, std::optional<std::string> batch_id = {}) {
    std::lock_guard writer(write_mu_);
    const Snapshot current = snapshot();

    ReferenceContext known;
    for (const auto& [id, p] : current->patients) known.patient_ids.insert(id);
    for (const auto& [id, u] : current->units) known.unit_ids.insert(id);
    known.professions = config_.profession_codes();
    auto report = validate_entity_graph(batch, known);
    if (!report.empty()) throw ValidationFailed(std::move(report));

    auto next = std::make_shared<StoreState>(*current);
    detail::upsert(next->units, batch.units);
    detail::upsert(next->patients, batch.patients);
    detail::upsert(next->measures, batch.measures);
    detail::upsert(next->prescriptions, batch.prescriptions);
    detail::upsert(next->observations, batch.observations);
    detail::upsert(next->micro_events, batch.micro_events);
    detail::upsert(next->annotations, batch.annotations);

    const std::size_t holidays_before = next->holidays.size();
    next->holidays.insert(batch.holidays.begin(), batch.holidays.end());
    const bool calendar_changed = next->holidays.size() != holidays_before;

    std::set<std::string> affected;
    for (const auto& m : batch.measures) affected.insert(m.id);
    std::set<std::string> moved_patients;
    for (const auto& p : batch.patients) moved_patients.insert(p.id);
    for (const auto& [id, m] : next->measures) {
      if (calendar_changed || moved_patients.contains(m.patient_id)) affected.insert(id);
    }

    const auto cal = calendar(*next);
    std::size_t generated = 0;
    for (const auto& id : affected) {
      const auto& m = next->measures.at(id);
      const Instant horizon = m.end_at.value_or(m.start_at + config_.task_horizon);
      auto tasks = generate_tasks(m, config_.rule_set, horizon, cal,
                                  next->patients.at(m.patient_id).unit_id);
      generated += tasks.size();
      next->tasks.replace_for_measure(id, std::move(tasks));
    }

    next->revision = current->revision + 1;
    IngestSummary summary;
    summary.batch_id = batch_id.value_or("batch-" + std::to_string(next->revision));
    summary.revision = next->revision;
    summary.tasks_generated = generated;
    summary.counts = {{"patients", batch.patients.size()},
                      {"units", batch.units.size()},
                      {"measures", batch.measures.size()},
                      {"prescriptions", batch.prescriptions.size()},
                      {"observations", batch.observations.size()},
                      {"microEvents", batch.micro_events.size()},
                      {"annotations", batch.annotations.size()},
                      {"holidays", batch.holidays.size()}};

    commit(std::move(next), {"data-ingested", summary.batch_id, summary.revision});
    return summary;
  }

  /// Marks a pending task completed (compare-and-set on its status).
  ValidationOutcome validate(const std::string& task_id, const Profession& actor, Instant at) {
    if (!config_.profession_codes().contains(actor.code)) {
      throw Error(ErrorCode::kBadRequest, "unknown profession '" + actor.code + "'");
    }
    std::lock_guard writer(write_mu_);
    const Snapshot current = snapshot();
    auto next = std::make_shared<StoreState>(*current);
    TaskInstance done = validate_task(next->tasks, task_id, actor, at);
    next->revision = current->revision + 1;
    const auto revision = next->revision;
    commit(std::move(next), {"task-validated", task_id, revision});
    return {std::move(done), revision};
  }

 private:
  void commit(std::shared_ptr<StoreState> next, const ChangeEvent& event) {
    if (data_dir_) persist(*next);
    {
      std::lock_guard lock(snapshot_mu_);
      state_ = std::move(next);
    }
    events_->publish(event);
  }

  void persist(const StoreState& s) const {
    const auto file = *data_dir_ / kSnapshotFile;
    const auto tmp = *data_dir_ / (std::string(kSnapshotFile) + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << detail::state_to_json(s).dump(1) << '\n';
      out.flush();
      if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot replace " + file.string() + ": " + ec.message());
  }

  ServiceConfig config_;
  BusinessCalendar base_calendar_;
  std::optional<std::filesystem::path> data_dir_;
  std::unique_ptr<EventHub> events_;

  std::mutex write_mu_;
  mutable std::mutex snapshot_mu_;
  Snapshot state_;
};

}  // namespace cliniline
