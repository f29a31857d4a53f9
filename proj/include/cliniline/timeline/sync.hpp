#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "cliniline/core/entities.hpp"
#include "cliniline/core/error.hpp"
#include "cliniline/timeline/items.hpp"
#include "cliniline/timeline/series.hpp"
#include "cliniline/timeline/viewport.hpp"

namespace cliniline {

enum class ComponentKind { kTimeline, kNumericChart };

inline std::string_view to_string(ComponentKind k) {
  return k == ComponentKind::kTimeline ? "timeline" : "numeric-chart";
}

struct Lane {
  std::string id;
  std::string label;

  bool operator==(const Lane&) const = default;
};

/// One panel of a dashboard. Timelines carry items, numeric charts carry
/// series; never both.
struct DashboardComponent {
  std::string id;
  std::string title;
  ComponentKind kind = ComponentKind::kTimeline;
  std::optional<Theme> theme;
  std::vector<TimelineItem> items;
  std::vector<ClinicalSeries> series;
  std::vector<Lane> lanes;

  bool operator==(const DashboardComponent&) const = default;
};

struct PanRequest {
  std::string component_id;
  Duration delta{};
};

struct ZoomRequest {
  std::string component_id;
  double factor = 1.0;
  Instant anchor{};
};

using ViewportOp = std::variant<PanRequest, ZoomRequest>;

/// All components of one dashboard bound to a single viewport.
class SyncGroup {
 public:
  SyncGroup(std::string dashboard_id, Viewport viewport, std::vector<std::string> component_ids,
            ViewportLimits limits = {})
      : dashboard_id_(std::move(dashboard_id)),
        viewport_(viewport),
        component_ids_(std::move(component_ids)),
        limits_(limits) {}

  const std::string& dashboard_id() const { return dashboard_id_; }
  const Viewport& viewport() const { return viewport_; }
  const std::vector<std::string>& component_ids() const { return component_ids_; }
  const ViewportLimits& limits() const { return limits_; }

  bool has_component(std::string_view id) const {
    return std::find(component_ids_.begin(), component_ids_.end(), id) != component_ids_.end();
  }

  /// Every member observes the same viewport.
  const Viewport& viewport_of(std::string_view component_id) const {
    if (!has_component(component_id)) {
      throw Error(ErrorCode::kNotFound, "no component '" + std::string(component_id) + "'");
    }
    return viewport_;
  }

  SyncGroup with_viewport(Viewport v) const {
    SyncGroup copy = *this;
    copy.viewport_ = v;
    return copy;
  }

 private:
  std::string dashboard_id_;
  Viewport viewport_;
  std::vector<std::string> component_ids_;
  ViewportLimits limits_;
};

/// Applies a navigation gesture from any member to the shared viewport. On
/// error the input group is untouched and the error propagates.
inline SyncGroup sync_apply(const SyncGroup& group, const ViewportOp& op) {
  const Viewport next = std::visit(
      [&](const auto& req) -> Viewport {
        using T = std::decay_t<decltype(req)>;
        const Viewport& current = group.viewport_of(req.component_id);
        if constexpr (std::is_same_v<T, PanRequest>) {
          return pan(current, req.delta);
        } else {
          return zoom(current, req.factor, req.anchor, group.limits());
        }
      },
      op);
  return group.with_viewport(next);
}

}  // namespace cliniline
