#pragma once

#include <cmath>
#include <string>

#include "cliniline/core/error.hpp"
#include "cliniline/core/time.hpp"

namespace cliniline {

/// Zoom bounds on the visible span.
struct ViewportLimits {
  Duration min_span = minutes(5);
  Duration max_span = days(3650);
};

/// Half-open visible window [start, end).
class Viewport {
 public:
  Viewport(Instant start, Instant end) : start_(start), end_(end) {
    if (!(start < end)) {
      throw Error(ErrorCode::kDomain, "viewport start must precede end");
    }
  }

  Instant start() const { return start_; }
  Instant end() const { return end_; }
  Duration span() const { return end_ - start_; }

  bool contains(Instant t) const { return start_ <= t && t < end_; }
  bool within(const ViewportLimits& limits) const {
    return span() >= limits.min_span && span() <= limits.max_span;
  }

  bool operator==(const Viewport&) const = default;

 private:
  Instant start_;
  Instant end_;
};

/// Translation; the span is preserved and there is no clamping, so scrolling
/// is unbounded in both directions.
inline Viewport pan(const Viewport& v, Duration delta) {
  return Viewport(v.start() + delta, v.end() + delta);
}

/// Scales the span by 1/factor (factor > 1 zooms in) keeping `anchor` at the
/// same relative position. The new span is clamped to `limits`.
inline Viewport zoom(const Viewport& v, double factor, Instant anchor,
                     const ViewportLimits& limits = {}) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorCode::kDomain, "zoom factor must be a positive finite number");
  }
  if (!v.contains(anchor)) {
    throw Error(ErrorCode::kDomain, "zoom anchor must lie inside the viewport");
  }
  const double span = static_cast<double>(v.span().count());
  auto target = static_cast<std::int64_t>(std::llround(span / factor));
  if (target < limits.min_span.count()) target = limits.min_span.count();
  if (target > limits.max_span.count()) target = limits.max_span.count();

  const double ratio = static_cast<double>((anchor - v.start()).count()) / span;
  const auto offset =
      static_cast<std::int64_t>(std::llround(ratio * static_cast<double>(target)));
  const Instant start = anchor - Duration{offset};
  return Viewport(start, start + Duration{target});
}

}  // namespace cliniline
