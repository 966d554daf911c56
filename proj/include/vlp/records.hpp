#pragma once

// Newline-delimited JSON records for position fixes and ground truth.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vlp/error.hpp"
#include "vlp/pipeline.hpp"
#include "vlp/scene.hpp"

namespace vlp {

inline nlohmann::json to_json(const PositionFix& fix) {
  using nlohmann::json;
  json j;
  j["frame"] = fix.frame_index;
  j["t"] = fix.timestamp;
  j["status"] = to_string(fix.status);
  if (fix.position) {
    j["x_cm"] = fix.position->x_cm;
    j["y_cm"] = fix.position->y_cm;
    j["H_cm"] = fix.position->height_cm;
  } else {
    j["x_cm"] = nullptr;
    j["y_cm"] = nullptr;
    j["H_cm"] = nullptr;
  }
  j["stale"] = fix.stale;
  j["lamps"] = json::array();
  for (const auto& lamp : fix.lamps) {
    j["lamps"].push_back({{"id", lamp.id},
                          {"u", lamp.centroid.u},
                          {"v", lamp.centroid.v},
                          {"rho", lamp.rho},
                          {"tracking", lamp.tracking}});
  }
  j["proc_ms"] = fix.proc_ms;
  return j;
}

inline FixStatus parse_fix_status(const std::string& s) {
  if (s == "Fix") return FixStatus::Fix;
  if (s == "Degraded") return FixStatus::Degraded;
  if (s == "Acquiring") return FixStatus::Acquiring;
  throw Error(ErrorKind::Schema, "unknown fix status " + s);
}

inline PositionFix fix_from_json(const nlohmann::json& j) {
  PositionFix fix;
  fix.frame_index = j.at("frame").get<long>();
  fix.timestamp = j.at("t").get<double>();
  fix.status = parse_fix_status(j.at("status").get<std::string>());
  if (!j.at("x_cm").is_null()) {
    fix.position = TerminalEstimate{j.at("x_cm").get<double>(), j.at("y_cm").get<double>(),
                                    j.at("H_cm").get<double>()};
  }
  fix.stale = j.value("stale", false);
  for (const auto& l : j.at("lamps")) {
    LampReport rep;
    rep.id = l.at("id").get<int>();
    rep.centroid = {l.at("u").get<double>(), l.at("v").get<double>()};
    rep.rho = l.at("rho").get<double>();
    rep.tracking = l.value("tracking", true);
    fix.lamps.push_back(rep);
  }
  fix.proc_ms = j.value("proc_ms", 0.0);
  return fix;
}

inline nlohmann::json to_json(const GroundTruth& truth) {
  using nlohmann::json;
  json j;
  j["frame"] = truth.frame_index;
  j["t"] = truth.timestamp;
  const auto& p = truth.terminal_position;
  j["terminal"] = {p.x, p.y, p.z};
  j["lamps"] = json::array();
  for (const auto& lamp : truth.lamps) {
    j["lamps"].push_back({{"id", lamp.id},
                          {"in_view", lamp.in_view},
                          {"u", lamp.centroid.u},
                          {"v", lamp.centroid.v},
                          {"radius_px", lamp.radius_px},
                          {"visible_fraction", lamp.visible_area_fraction}});
  }
  return j;
}

inline GroundTruth truth_from_json(const nlohmann::json& j) {
  GroundTruth truth;
  truth.frame_index = j.at("frame").get<long>();
  truth.timestamp = j.at("t").get<double>();
  const auto& p = j.at("terminal");
  truth.terminal_position = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
  for (const auto& l : j.at("lamps")) {
    LampTruth lt;
    lt.id = l.at("id").get<int>();
    lt.in_view = l.at("in_view").get<bool>();
    lt.centroid = {l.at("u").get<double>(), l.at("v").get<double>()};
    lt.radius_px = l.at("radius_px").get<double>();
    lt.visible_area_fraction = l.at("visible_fraction").get<double>();
    truth.lamps.push_back(lt);
  }
  return truth;
}

/// Parses every non-empty line of a JSONL file with `parse`.
template <class T, class Parse>
std::vector<T> read_jsonl(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::vector<T> out;
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(parse(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Schema, path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace vlp
