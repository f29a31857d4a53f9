#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cliniline {

enum class ErrorCode {
  kRange,              // civil date outside the supported 1970-2100 range
  kCalendarExhausted,  // no business day found within the backward scan limit
  kInvalidHorizon,
  kDomain,             // bad zoom factor, anchor outside viewport, unsorted series...
  kNotFound,
  kAlreadyCompleted,
  kInvalidView,
  kParse,
  kValidation,
  kBadRequest,
  kIo,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRange: return "range";
    case ErrorCode::kCalendarExhausted: return "calendar-exhausted";
    case ErrorCode::kInvalidHorizon: return "invalid-horizon";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kAlreadyCompleted: return "already-completed";
    case ErrorCode::kInvalidView: return "invalid-view";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kBadRequest: return "bad-request";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cliniline
