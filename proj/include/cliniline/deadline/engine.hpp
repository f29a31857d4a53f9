#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cliniline/calendar/business_calendar.hpp"
#include "cliniline/core/entities.hpp"
#include "cliniline/core/error.hpp"
#include "cliniline/core/time.hpp"

namespace cliniline {

enum class AnticipationPolicy { kNone, kBusinessDay };

inline std::string_view to_string(AnticipationPolicy p) {
  return p == AnticipationPolicy::kNone ? "none" : "business-day";
}

inline AnticipationPolicy parse_anticipation_policy(std::string_view s) {
  if (s == "none") return AnticipationPolicy::kNone;
  if (s == "business-day") return AnticipationPolicy::kBusinessDay;
  throw Error(ErrorCode::kParse, "unknown anticipation policy '" + std::string(s) + "'");
}

/// Template turning a measure into one task (offset only) or a periodic series
/// of tasks (offset + period). Offsets count from the measure start.
struct TaskRule {
  std::string id;
  std::string label;
  Profession profession;
  Duration offset{};
  std::optional<Duration> period;
  AnticipationPolicy anticipation = AnticipationPolicy::kNone;

  bool operator==(const TaskRule&) const = default;
};

struct DeadlineRuleSet {
  std::string id;
  std::vector<TaskRule> rules;

  bool operator==(const DeadlineRuleSet&) const = default;

  const TaskRule* find(std::string_view rule_id) const {
    for (const auto& r : rules) {
      if (r.id == rule_id) return &r;
    }
    return nullptr;
  }

  std::set<std::string> professions() const {
    std::set<std::string> out;
    for (const auto& r : rules) out.insert(r.profession.code);
    return out;
  }
};

inline void validate_rule_set(const DeadlineRuleSet& set) {
  std::set<std::string> ids;
  for (const auto& r : set.rules) {
    if (r.id.empty()) throw Error(ErrorCode::kDomain, "task rule id must not be empty");
    if (!ids.insert(r.id).second) {
      throw Error(ErrorCode::kDomain, "duplicate task rule id '" + r.id + "'");
    }
    if (r.offset <= Duration::zero()) {
      throw Error(ErrorCode::kDomain, "rule '" + r.id + "': offset must be positive");
    }
    if (r.period && *r.period <= Duration::zero()) {
      throw Error(ErrorCode::kDomain, "rule '" + r.id + "': period must be positive");
    }
  }
}

enum class TaskStatus { kPending, kCompleted };

inline std::string_view to_string(TaskStatus s) {
  return s == TaskStatus::kPending ? "pending" : "completed";
}

inline TaskStatus parse_task_status(std::string_view s) {
  if (s == "pending") return TaskStatus::kPending;
  if (s == "completed") return TaskStatus::kCompleted;
  throw Error(ErrorCode::kParse, "unknown task status '" + std::string(s) + "'");
}

struct TaskInstance {
  std::string id;
  std::string rule_id;
  std::string measure_id;
  std::string patient_id;
  std::string unit_id;
  std::string label;
  Profession profession;
  int sequence = 1;
  Instant due_at{};
  Instant anticipated_due_at{};
  TaskStatus status = TaskStatus::kPending;
  std::optional<Instant> completed_at;
  std::optional<Profession> completed_by;

  bool operator==(const TaskInstance&) const = default;

  Instant effective_due(bool use_anticipated) const {
    return use_anticipated ? anticipated_due_at : due_at;
  }
};

inline std::string task_id(std::string_view measure_id, std::string_view rule_id, int sequence) {
  return std::string(measure_id) + ":" + std::string(rule_id) + ":" + std::to_string(sequence);
}

/// Expands every rule of the set against the measure, up to the earlier of
/// `horizon_end` and the measure end (both inclusive). Sorted by
/// (dueAt, ruleId, sequence).
inline std::vector<TaskInstance> generate_tasks(const SeclusionMeasure& measure,
                                                const DeadlineRuleSet& rules,
                                                Instant horizon_end,
                                                const BusinessCalendar& cal,
                                                const std::string& unit_id = {}) {
  if (horizon_end <= measure.start_at) {
    throw Error(ErrorCode::kInvalidHorizon,
                "horizon " + format_instant(horizon_end) + " does not follow measure start " +
                    format_instant(measure.start_at));
  }
  const Instant horizon = measure.end_at ? std::min(horizon_end, *measure.end_at) : horizon_end;

  std::vector<TaskInstance> tasks;
  auto emit = [&](const TaskRule& rule, int sequence, Instant due) {
    TaskInstance t;
    t.id = task_id(measure.id, rule.id, sequence);
    t.rule_id = rule.id;
    t.measure_id = measure.id;
    t.patient_id = measure.patient_id;
    t.unit_id = unit_id;
    t.label = rule.label;
    t.profession = rule.profession;
    t.sequence = sequence;
    t.due_at = due;
    t.anticipated_due_at =
        rule.anticipation == AnticipationPolicy::kBusinessDay ? anticipate(due, cal) : due;
    tasks.push_back(std::move(t));
  };

  for (const auto& rule : rules.rules) {
    const Instant first = measure.start_at + rule.offset;
    if (first > horizon) continue;
    if (!rule.period) {
      emit(rule, 1, first);
      continue;
    }
    // count = floor((H - start - offset) / period) + 1
    const auto count = (horizon - first) / *rule.period + 1;
    for (std::int64_t k = 0; k < count; ++k) {
      emit(rule, static_cast<int>(k + 1), first + k * *rule.period);
    }
  }

  std::sort(tasks.begin(), tasks.end(), [](const TaskInstance& a, const TaskInstance& b) {
    return std::tie(a.due_at, a.rule_id, a.sequence) < std::tie(b.due_at, b.rule_id, b.sequence);
  });
  return tasks;
}

// ---------------------------------------------------------------------------
// Urgency

/// Declared from least to most severe; `kDone` sits outside the scale.
enum class UrgencyBand { kSafe, kCaution, kWarning, kCritical, kOverdue, kDone };

/// Higher is more severe. Completed tasks rank below everything.
inline int severity(UrgencyBand b) {
  return b == UrgencyBand::kDone ? -1 : static_cast<int>(b);
}

inline std::string_view to_string(UrgencyBand b) {
  switch (b) {
    case UrgencyBand::kSafe: return "safe";
    case UrgencyBand::kCaution: return "caution";
    case UrgencyBand::kWarning: return "warning";
    case UrgencyBand::kCritical: return "critical";
    case UrgencyBand::kOverdue: return "overdue";
    case UrgencyBand::kDone: return "done";
  }
  return "safe";
}

struct UrgencyThresholds {
  Duration critical_below = hours(6);
  Duration warning_below = hours(24);
  Duration caution_below = hours(48);

  bool operator==(const UrgencyThresholds&) const = default;
};

inline void validate_thresholds(const UrgencyThresholds& th) {
  if (!(Duration::zero() < th.critical_below && th.critical_below < th.warning_below &&
        th.warning_below < th.caution_below)) {
    throw Error(ErrorCode::kDomain,
                "urgency thresholds must satisfy 0 < critical < warning < caution");
  }
}

inline UrgencyBand classify_urgency(const TaskInstance& task, Instant now,
                                    const UrgencyThresholds& th, bool use_anticipated) {
  if (task.status == TaskStatus::kCompleted) return UrgencyBand::kDone;
  const Duration remaining = task.effective_due(use_anticipated) - now;
  if (remaining < Duration::zero()) return UrgencyBand::kOverdue;
  if (remaining < th.critical_below) return UrgencyBand::kCritical;
  if (remaining < th.warning_below) return UrgencyBand::kWarning;
  if (remaining < th.caution_below) return UrgencyBand::kCaution;
  return UrgencyBand::kSafe;
}

/// Orders tasks by band severity (most urgent first), then effective due
/// instant, then id.
inline void prioritize(std::vector<TaskInstance>& tasks, Instant now,
                       const UrgencyThresholds& th, bool use_anticipated) {
  std::stable_sort(tasks.begin(), tasks.end(), [&](const TaskInstance& a, const TaskInstance& b) {
    const int sa = severity(classify_urgency(a, now, th, use_anticipated));
    const int sb = severity(classify_urgency(b, now, th, use_anticipated));
    if (sa != sb) return sa > sb;
    const Instant da = a.effective_due(use_anticipated);
    const Instant db = b.effective_due(use_anticipated);
    if (da != db) return da < db;
    return a.id < b.id;
  });
}

}  // namespace cliniline
