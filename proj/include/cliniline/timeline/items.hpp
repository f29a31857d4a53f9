#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cliniline/core/entities.hpp"
#include "cliniline/core/error.hpp"
#include "cliniline/core/time.hpp"
#include "cliniline/deadline/engine.hpp"

namespace cliniline {

enum class ItemKind { kRange, kPoint, kBackground };

inline std::string_view to_string(ItemKind k) {
  switch (k) {
    case ItemKind::kRange: return "range";
    case ItemKind::kPoint: return "point";
    case ItemKind::kBackground: return "background";
  }
  return "point";
}

inline ItemKind parse_item_kind(std::string_view s) {
  if (s == "range") return ItemKind::kRange;
  if (s == "point") return ItemKind::kPoint;
  if (s == "background") return ItemKind::kBackground;
  throw Error(ErrorCode::kParse, "unknown item kind '" + std::string(s) + "'");
}

/// Semantic color; the concrete palette belongs to the client.
enum class ColorToken { kOverdue, kCritical, kWarning, kCaution, kSafe, kDone, kNeutral, kBandGrey };

inline std::string_view to_string(ColorToken c) {
  switch (c) {
    case ColorToken::kOverdue: return "overdue";
    case ColorToken::kCritical: return "critical";
    case ColorToken::kWarning: return "warning";
    case ColorToken::kCaution: return "caution";
    case ColorToken::kSafe: return "safe";
    case ColorToken::kDone: return "done";
    case ColorToken::kNeutral: return "neutral";
    case ColorToken::kBandGrey: return "band-grey";
  }
  return "neutral";
}

inline ColorToken parse_color_token(std::string_view s) {
  for (auto c : {ColorToken::kOverdue, ColorToken::kCritical, ColorToken::kWarning,
                 ColorToken::kCaution, ColorToken::kSafe, ColorToken::kDone,
                 ColorToken::kNeutral, ColorToken::kBandGrey}) {
    if (to_string(c) == s) return c;
  }
  throw Error(ErrorCode::kParse, "unknown color token '" + std::string(s) + "'");
}

inline ColorToken color_of(UrgencyBand b) {
  switch (b) {
    case UrgencyBand::kOverdue: return ColorToken::kOverdue;
    case UrgencyBand::kCritical: return ColorToken::kCritical;
    case UrgencyBand::kWarning: return ColorToken::kWarning;
    case UrgencyBand::kCaution: return ColorToken::kCaution;
    case UrgencyBand::kSafe: return ColorToken::kSafe;
    case UrgencyBand::kDone: return ColorToken::kDone;
  }
  return ColorToken::kNeutral;
}

using Tooltip = std::vector<std::pair<std::string, std::string>>;

struct TimelineItem {
  std::string id;
  std::string component_id;
  std::string group;
  ItemKind kind = ItemKind::kPoint;
  Instant start{};
  std::optional<Instant> end;
  std::string label;
  ColorToken color = ColorToken::kNeutral;
  Tooltip tooltip;
  std::optional<std::string> payload_ref;
  bool validatable = false;

  bool operator==(const TimelineItem&) const = default;
};

/// Throws kDomain when the item breaks its shape invariants. Whether a
/// validatable item's payload names a real task is checked against `tasks`.
inline void check_item(const TimelineItem& item,
                       const std::map<std::string, TaskInstance>* tasks = nullptr) {
  if (item.kind != ItemKind::kPoint && (!item.end || !(*item.end > item.start))) {
    throw Error(ErrorCode::kDomain, "item '" + item.id + "': range needs end > start");
  }
  if (item.validatable) {
    if (!item.payload_ref || (tasks != nullptr && !tasks->contains(*item.payload_ref))) {
      throw Error(ErrorCode::kDomain, "item '" + item.id + "': validatable without a task");
    }
  }
}

/// Point item at the task's effective due instant, colored by urgency.
inline TimelineItem task_to_item(const TaskInstance& task, Instant now,
                                 const UrgencyThresholds& th, bool use_anticipated) {
  TimelineItem item;
  item.id = task.id;
  item.group = task.rule_id;
  item.kind = ItemKind::kPoint;
  item.start = task.effective_due(use_anticipated);
  item.label = task.label;
  item.color = color_of(classify_urgency(task, now, th, use_anticipated));
  item.tooltip = {
      {"Task", task.label},
      {"Profession", task.profession.code},
      {"Due", format_instant(task.due_at)},
      {"Anticipated due", format_instant(task.anticipated_due_at)},
      {"Status", std::string(to_string(task.status))},
  };
  item.payload_ref = task.id;
  item.validatable = task.status == TaskStatus::kPending;
  return item;
}

/// Keeps every non-task item plus the task items owned by `profession`.
/// With no profession the input is returned as is.
inline std::vector<TimelineItem> filter_items(const std::vector<TimelineItem>& items,
                                              const std::optional<Profession>& profession,
                                              const std::map<std::string, TaskInstance>& tasks) {
  if (!profession) return items;
  std::vector<TimelineItem> out;
  for (const auto& item : items) {
    const auto task = item.payload_ref ? tasks.find(*item.payload_ref) : tasks.end();
    if (task == tasks.end() || task->second.profession == *profession) out.push_back(item);
  }
  return out;
}

}  // namespace cliniline
