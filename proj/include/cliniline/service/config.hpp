#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cliniline/calendar/business_calendar.hpp"
#include "cliniline/core/error.hpp"
#include "cliniline/deadline/engine.hpp"
#include "cliniline/timeline/viewport.hpp"

namespace cliniline {

using Json = nlohmann::ordered_json;

/// Illustrative seclusion follow-up schedule. Offsets are configuration, not
/// legal ground truth.
inline DeadlineRuleSet default_rule_set() {
  return {"default",
          {
              {"pm-renewal", "Prescription médicale (PM) renewal", {"physician"}, hours(12),
               hours(12), AnticipationPolicy::kNone},
              {"jld-hearing-prep", "JLD hearing preparation", {"judge-liaison"}, hours(24),
               std::nullopt, AnticipationPolicy::kBusinessDay},
              {"jld-referral", "JLD referral", {"administrative"}, hours(72), std::nullopt,
               AnticipationPolicy::kBusinessDay},
          }};
}

inline const std::vector<std::string>& default_professions() {
  static const std::vector<std::string> codes = {"physician", "nurse", "administrative",
                                                 "judge-liaison"};
  return codes;
}

struct DashboardWindow {
  Duration before{};
  Duration after{};
};

struct ServiceConfig {
  std::string timezone = "Europe/Paris";
  std::set<Weekday> weekend_days = {Weekday::saturday, Weekday::sunday};
  UrgencyThresholds thresholds;
  ViewportLimits limits;
  DeadlineRuleSet rule_set = default_rule_set();
  std::vector<std::string> professions = default_professions();
  int port = 8080;
  std::string data_dir = "data";
  // Task generation horizon for measures without an end.
  Duration task_horizon = days(7);
  DashboardWindow isopsy_window{days(3), days(4)};
  DashboardWindow atbviz_window{days(14), days(1)};

  BusinessCalendar calendar() const { return BusinessCalendar(timezone, weekend_days); }

  /// Configured vocabulary plus every profession a rule refers to.
  std::set<std::string> profession_codes() const {
    std::set<std::string> out(professions.begin(), professions.end());
    for (const auto& code : rule_set.professions()) out.insert(code);
    return out;
  }
};

namespace detail {

inline Duration hours_to_ms(const Json& v, const std::string& key) {
  if (!v.is_number()) throw Error(ErrorCode::kParse, "config: '" + key + "' must be a number");
  const double h = v.get<double>();
  if (!std::isfinite(h)) throw Error(ErrorCode::kParse, "config: '" + key + "' must be finite");
  return Duration{std::llround(h * 3'600'000.0)};
}

inline std::string required_string(const Json& obj, const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw Error(ErrorCode::kParse, "config: rule field '" + key + "' must be a string");
  }
  return obj[key].get<std::string>();
}

inline TaskRule parse_rule(const Json& r) {
  if (!r.is_object()) throw Error(ErrorCode::kParse, "config: ruleSet entries must be objects");
  TaskRule rule;
  rule.id = required_string(r, "id");
  rule.label = r.value("label", rule.id);
  rule.profession = {required_string(r, "profession")};
  if (r.value("trigger", std::string("measure-start")) != "measure-start") {
    throw Error(ErrorCode::kParse, "config: rule '" + rule.id + "' has unsupported trigger");
  }
  if (!r.contains("offsetH")) throw Error(ErrorCode::kParse, "config: rule '" + rule.id + "' needs offsetH");
  rule.offset = hours_to_ms(r["offsetH"], "offsetH");
  if (r.contains("periodH") && !r["periodH"].is_null()) rule.period = hours_to_ms(r["periodH"], "periodH");
  rule.anticipation = parse_anticipation_policy(r.value("anticipation", std::string("none")));
  return rule;
}

}  // namespace detail

/// Reads the server configuration document. Missing keys keep their defaults.
inline ServiceConfig parse_config(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "config: top level must be an object");
  ServiceConfig cfg;
  try {
    if (doc.contains("timezone")) cfg.timezone = doc["timezone"].get<std::string>();
    if (doc.contains("weekendDays")) {
      cfg.weekend_days.clear();
      for (const auto& d : doc["weekendDays"]) cfg.weekend_days.insert(parse_weekday(d.get<std::string>()));
    }
    if (doc.contains("urgencyThresholds")) {
      const auto& th = doc["urgencyThresholds"];
      if (th.contains("criticalBelowH")) cfg.thresholds.critical_below = detail::hours_to_ms(th["criticalBelowH"], "criticalBelowH");
      if (th.contains("warningBelowH")) cfg.thresholds.warning_below = detail::hours_to_ms(th["warningBelowH"], "warningBelowH");
      if (th.contains("cautionBelowH")) cfg.thresholds.caution_below = detail::hours_to_ms(th["cautionBelowH"], "cautionBelowH");
    }
    if (doc.contains("viewport")) {
      const auto& vp = doc["viewport"];
      if (vp.contains("minSpanMin")) cfg.limits.min_span = detail::hours_to_ms(vp["minSpanMin"], "minSpanMin") / 60;
      if (vp.contains("maxSpanDays")) cfg.limits.max_span = detail::hours_to_ms(vp["maxSpanDays"], "maxSpanDays") * 24;
    }
    if (doc.contains("ruleSet")) {
      cfg.rule_set = {"config", {}};
      for (const auto& r : doc["ruleSet"]) cfg.rule_set.rules.push_back(detail::parse_rule(r));
    }
    if (doc.contains("professions")) cfg.professions = doc["professions"].get<std::vector<std::string>>();
    if (doc.contains("port")) cfg.port = doc["port"].get<int>();
    if (doc.contains("dataDir")) cfg.data_dir = doc["dataDir"].get<std::string>();
    if (doc.contains("taskHorizonDays")) cfg.task_horizon = detail::hours_to_ms(doc["taskHorizonDays"], "taskHorizonDays") * 24;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }

  cfg.calendar();  // resolves the zone or throws
  validate_thresholds(cfg.thresholds);
  validate_rule_set(cfg.rule_set);
  if (!(Duration::zero() < cfg.limits.min_span && cfg.limits.min_span < cfg.limits.max_span)) {
    throw Error(ErrorCode::kDomain, "config: viewport needs 0 < minSpan < maxSpan");
  }
  if (cfg.task_horizon <= Duration::zero()) {
    throw Error(ErrorCode::kDomain, "config: taskHorizonDays must be positive");
  }
  return cfg;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ServiceConfig load_config(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

}  // namespace cliniline
