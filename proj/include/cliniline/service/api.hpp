#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cliniline/core/error.hpp"
#include "cliniline/core/time.hpp"
#include "cliniline/deadline/engine.hpp"
#include "cliniline/service/dashboard.hpp"
#include "cliniline/service/store.hpp"
#include "cliniline/service/wire.hpp"

namespace cliniline {

struct ApiRequest {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::map<std::string, std::string> headers;

  Json json() const { return Json::parse(body); }
};

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kBadRequest:
    case ErrorCode::kDomain:
    case ErrorCode::kInvalidView:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kAlreadyCompleted:
      return 409;
    case ErrorCode::kValidation:
    case ErrorCode::kCalendarExhausted:
    case ErrorCode::kRange:
    case ErrorCode::kInvalidHorizon:
      return 422;
    case ErrorCode::kIo:
      return 500;
  }
  return 500;
}

inline Instant now_ms() {
  return std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now());
}

namespace detail {

inline std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i <= path.size()) {
    const std::size_t j = path.find('/', i);
    const std::string_view part = path.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i);
    if (!part.empty()) parts.emplace_back(part);
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return parts;
}

inline std::optional<std::string> param(const ApiRequest& req, const std::string& key) {
  const auto it = req.query.find(key);
  if (it == req.query.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

inline bool flag(const ApiRequest& req, const std::string& key) {
  const auto v = param(req, key);
  if (!v || *v == "false" || *v == "0") return false;
  if (*v == "true" || *v == "1") return true;
  throw Error(ErrorCode::kBadRequest, "'" + key + "' must be true or false");
}

inline Instant as_of(const ApiRequest& req) {
  const auto v = param(req, "asOf");
  return v ? parse_instant(*v) : now_ms();
}

inline std::optional<Profession> profession(const ApiRequest& req, const ServiceConfig& cfg) {
  const auto v = param(req, "profession");
  if (!v) return std::nullopt;
  if (!cfg.profession_codes().contains(*v)) {
    throw Error(ErrorCode::kBadRequest, "unknown profession '" + *v + "'");
  }
  return Profession{*v};
}

inline ApiResponse json_response(int status, const Json& body) { return {status, body.dump(), {}}; }

inline ApiResponse error_response(const Error& e) {
  Json body = {{"error", to_string(e.code())}, {"message", e.what()}};
  if (const auto* vf = dynamic_cast<const ValidationFailed*>(&e)) body["report"] = wire::to_json(vf->report());
  return json_response(http_status(e.code()), body);
}

}  // namespace detail

/// Transport-independent route table. The HTTP binding forwards to handle();
/// tests can call it in process.
class Api {
 public:
  explicit Api(Store& store) : store_(store) {}

  Store& store() { return store_; }

  ApiResponse handle(const ApiRequest& req) {
    try {
      return route(req);
    } catch (const Error& e) {
      return detail::error_response(e);
    } catch (const Json::exception& e) {
      return detail::error_response(Error(ErrorCode::kParse, e.what()));
    } catch (const std::exception& e) {
      return detail::json_response(500, {{"error", "internal"}, {"message", e.what()}});
    }
  }

 private:
  ApiResponse route(const ApiRequest& req) {
    const auto parts = detail::split_path(req.path);
    const std::size_t n = parts.size();
    if (n < 2 || parts[0] != "api") return not_found(req);
    const std::string& head = parts[1];

    if (head == "healthz" && n == 2 && req.method == "GET") {
      return detail::json_response(200, {{"status", "ok"}, {"revision", store_.snapshot()->revision}});
    }
    if (head == "ingest" && n == 2 && req.method == "POST") return ingest(req);
    if (head == "dashboards" && req.method == "GET") {
      if (n == 4 && parts[2] == "patient") return dashboard(req, DashboardScope::patient(parts[3]));
      if (n == 4 && parts[2] == "unit") return dashboard(req, DashboardScope::unit(parts[3]));
      if (n == 3 && parts[2] == "establishment") return dashboard(req, DashboardScope::establishment());
    }
    if (head == "tasks") {
      if (n == 2 && req.method == "GET") return tasks(req);
      if (n == 4 && parts[3] == "validate" && req.method == "POST") return validate(req, parts[2]);
    }
    return not_found(req);
  }

  static ApiResponse not_found(const ApiRequest& req) {
    return detail::json_response(404, {{"error", "not-found"}, {"message", "no route " + req.method + " " + req.path}});
  }

  ApiResponse ingest(const ApiRequest& req) {
    Json doc;
    try {
      doc = Json::parse(req.body);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kParse, std::string("invalid JSON: ") + e.what());
    }
    const EntityBatch batch = wire::batch_from_json(doc);
    std::optional<std::string> batch_id;
    if (doc.is_object() && doc.contains("batchId") && doc["batchId"].is_string()) {
      batch_id = doc["batchId"].get<std::string>();
    }
    const IngestSummary s = store_.ingest(batch, batch_id);
    Json counts = Json::object();
    for (const auto& [k, v] : s.counts) counts[k] = v;
    return detail::json_response(200, {{"batchId", s.batch_id},
                                       {"revision", s.revision},
                                       {"counts", counts},
                                       {"tasksGenerated", s.tasks_generated}});
  }

  ApiResponse dashboard(const ApiRequest& req, const DashboardScope& scope) {
    const auto view = parse_dashboard_view(detail::param(req, "view").value_or("isopsy"));
    DashboardOptions opts;
    opts.use_anticipated = detail::flag(req, "anticipate");
    opts.profession = detail::profession(req, store_.config());
    const Instant at = detail::as_of(req);
    const Snapshot snap = store_.snapshot();
    const DashboardDoc doc = assemble_dashboard(*snap, store_.config(), scope, view, at, opts);
    ApiResponse res = detail::json_response(200, wire::to_json(doc));
    res.headers["ETag"] = "\"" + std::to_string(snap->revision) + "\"";
    return res;
  }

  ApiResponse tasks(const ApiRequest& req) {
    std::optional<TaskStatus> status;
    if (const auto s = detail::param(req, "status")) {
      try {
        status = parse_task_status(*s);
      } catch (const Error&) {
        throw Error(ErrorCode::kBadRequest, "unknown status '" + *s + "'");
      }
    }
    const auto profession = detail::profession(req, store_.config());
    const auto unit = detail::param(req, "unit");
    const auto patient = detail::param(req, "patient");
    const bool anticipated = detail::flag(req, "anticipate");
    const Instant at = detail::as_of(req);

    const Snapshot snap = store_.snapshot();
    if (unit && !snap->units.contains(*unit)) throw Error(ErrorCode::kNotFound, "unknown unit '" + *unit + "'");
    std::vector<TaskInstance> out;
    for (const auto& [id, t] : snap->tasks.all()) {
      if (status && t.status != *status) continue;
      if (profession && t.profession != *profession) continue;
      if (unit && t.unit_id != *unit) continue;
      if (patient && t.patient_id != *patient) continue;
      out.push_back(t);
    }
    const auto& th = store_.config().thresholds;
    prioritize(out, at, th, anticipated);
    Json list = Json::array();
    for (const auto& t : out) {
      Json j = wire::to_json(t);
      j["urgency"] = to_string(classify_urgency(t, at, th, anticipated));
      list.push_back(std::move(j));
    }
    ApiResponse res = detail::json_response(
        200, {{"asOf", format_instant(at)}, {"revision", snap->revision}, {"tasks", list}});
    res.headers["ETag"] = "\"" + std::to_string(snap->revision) + "\"";
    return res;
  }

  ApiResponse validate(const ApiRequest& req, const std::string& id) {
    Json body;
    try {
      body = req.body.empty() ? Json::object() : Json::parse(req.body);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kParse, std::string("invalid JSON: ") + e.what());
    }
    if (!body.is_object() || !body.contains("actor") || !body["actor"].is_string()) {
      throw Error(ErrorCode::kBadRequest, "body needs a string 'actor'");
    }
    const Profession actor{body["actor"].get<std::string>()};
    const Instant at = body.contains("timestamp") && !body["timestamp"].is_null()
                           ? parse_instant(body["timestamp"].get<std::string>())
                           : now_ms();
    const ValidationOutcome done = store_.validate(id, actor, at);
    return detail::json_response(200, {{"task", wire::to_json(done.task)}, {"revision", done.revision}});
  }

  Store& store_;
};

}  // namespace cliniline
