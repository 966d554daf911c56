#pragma once

// JSON configuration (schema_version 1). Unknown keys are errors; every error
// names the offending key path, e.g. "lamps[0].position".
//
//   {
//     "schema_version": 1,
//     "camera":     {"focal_length_mm", "pixel_pitch_um", "width", "height", "principal_point"},
//     "lamps":      [{"id", "position", "radius_cm", "stripe_period_rows", "on", "off"}],
//     "trajectory": {"waypoints", "speed_cm_s", "dwell_s"},
//     "occlusions": [{"lamp_id", "first_frame", "last_frame", "fraction", "side"}],
//     "noise_sigma", "dark_level", "fps", "seed", "rows_per_second", "jitter_sigma_cm",
//     "tracking":   {"lamps", "loss_area_ratio", "loss_frame_count", "reacquire_attempts",
//                    "start_hint", "detector", "led_id", "camshift", "ukf"}
//   }

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vlp/bench.hpp"
#include "vlp/error.hpp"
#include "vlp/pipeline.hpp"
#include "vlp/scene.hpp"

namespace vlp {

inline constexpr int kSchemaVersion = 1;

namespace config_detail {

using nlohmann::json;

inline std::string type_name(const json& j) { return j.type_name(); }

// Checked view of one JSON object. Keys read through it are recorded so that
// finish() can reject anything left over.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_.empty() ? "$" : path_, "expected an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw SchemaError(key_path(key), "missing required key");
    return j_.at(key);
  }

  double number(const std::string& key) { return as_number(at(key), key_path(key)); }
  double number(const std::string& key, double fallback) {
    return has(key) ? as_number(j_.at(key), key_path(key)) : fallback;
  }
  long integer(const std::string& key) { return as_integer(at(key), key_path(key)); }
  long integer(const std::string& key, long fallback) {
    return has(key) ? as_integer(j_.at(key), key_path(key)) : fallback;
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw SchemaError(key_path(key), "expected a string, got " + type_name(v));
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.contains(key)) throw SchemaError(key_path(key), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path, "expected a number, got " + type_name(v));
    return v.get<double>();
  }

  static long as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer, got " + type_name(v));
    return v.get<long>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

inline const json& array_at(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array, got " + type_name(v));
  return v;
}

inline std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline std::vector<double> numbers(const json& v, const std::string& path, std::size_t expected = 0) {
  array_at(v, path);
  if (expected > 0 && v.size() != expected) {
    throw SchemaError(path, "expected " + std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(Obj::as_number(v[i], index_path(path, i)));
  return out;
}

inline WorldPoint world_point(const json& v, const std::string& path) {
  const auto n = numbers(v, path, 3);
  return {n[0], n[1], n[2]};
}

// Wraps plain validation failures of a parsed section with its key path.
template <class Fn>
void validated(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

inline void check_version(Obj& root) {
  const long v = root.integer("schema_version");
  if (v != kSchemaVersion) {
    throw SchemaError("schema_version", "unsupported version " + std::to_string(v));
  }
}

inline CameraIntrinsics parse_camera(Obj o) {
  CameraIntrinsics c;
  c.focal_length = o.number("focal_length_mm", c.focal_length * 1e3) * 1e-3;
  if (o.has("pixel_pitch_um")) {
    const json& p = o.at("pixel_pitch_um");
    if (p.is_array()) {
      const auto n = numbers(p, o.key_path("pixel_pitch_um"), 2);
      c.pixel_pitch_x = n[0] * 1e-6;
      c.pixel_pitch_y = n[1] * 1e-6;
    } else {
      c.pixel_pitch_x = c.pixel_pitch_y = Obj::as_number(p, o.key_path("pixel_pitch_um")) * 1e-6;
    }
  }
  c.width = static_cast<int>(o.integer("width", c.width));
  c.height = static_cast<int>(o.integer("height", c.height));
  c.principal_point = {0.5 * c.width, 0.5 * c.height};
  if (o.has("principal_point")) {
    const auto n = numbers(o.at("principal_point"), o.key_path("principal_point"), 2);
    c.principal_point = {n[0], n[1]};
  }
  o.finish();
  validated("camera", [&] { c.validate(); });
  return c;
}

inline OcclusionSide parse_side(const std::string& s, const std::string& path) {
  if (s == "left") return OcclusionSide::Left;
  if (s == "right") return OcclusionSide::Right;
  if (s == "top") return OcclusionSide::Top;
  if (s == "bottom") return OcclusionSide::Bottom;
  throw SchemaError(path, "expected one of left, right, top, bottom");
}

inline const char* side_name(OcclusionSide s) {
  switch (s) {
    case OcclusionSide::Left: return "left";
    case OcclusionSide::Right: return "right";
    case OcclusionSide::Top: return "top";
    case OcclusionSide::Bottom: return "bottom";
  }
  return "left";
}

inline LampSpec parse_lamp(Obj o) {
  LampSpec l;
  l.id = static_cast<int>(o.integer("id"));
  l.position = world_point(o.at("position"), o.key_path("position"));
  l.radius_cm = o.number("radius_cm", l.radius_cm);
  if (o.has("stripe_period_rows") && !o.at("stripe_period_rows").is_null()) {
    l.stripe_period_rows = static_cast<int>(o.integer("stripe_period_rows"));
  }
  l.on_intensity = static_cast<int>(o.integer("on", l.on_intensity));
  l.off_intensity = static_cast<int>(o.integer("off", l.off_intensity));
  o.finish();
  return l;
}

inline Trajectory parse_trajectory(Obj o) {
  Trajectory t;
  const std::string wp_path = o.key_path("waypoints");
  const json& wps = array_at(o.at("waypoints"), wp_path);
  if (wps.empty()) throw SchemaError(wp_path, "needs at least one waypoint");
  for (std::size_t i = 0; i < wps.size(); ++i) t.waypoints.push_back(world_point(wps[i], index_path(wp_path, i)));
  t.speed_cm_s = o.number("speed_cm_s");
  t.dwell_s = o.number("dwell_s", 0.0);
  o.finish();
  return t;
}

inline OcclusionEvent parse_occlusion(Obj o) {
  OcclusionEvent ev;
  ev.lamp_id = static_cast<int>(o.integer("lamp_id"));
  ev.first_frame = o.integer("first_frame");
  ev.last_frame = o.integer("last_frame");
  ev.target_fraction = o.number("fraction");
  ev.side = parse_side(o.string("side", "left"), o.key_path("side"));
  o.finish();
  return ev;
}

inline StartHint parse_start_hint(const std::string& s, const std::string& path) {
  if (s == "prediction") return StartHint::Prediction;
  if (s == "previous_centroid") return StartHint::PreviousCentroid;
  throw SchemaError(path, "expected prediction or previous_centroid");
}

inline void parse_tracking(Obj o, PipelineConfig& cfg) {
  if (o.has("lamps")) {
    const auto ids = numbers(o.at("lamps"), o.key_path("lamps"), 2);
    cfg.wanted = {static_cast<int>(ids[0]), static_cast<int>(ids[1])};
  }
  cfg.loss_area_ratio = o.number("loss_area_ratio", cfg.loss_area_ratio);
  cfg.loss_frame_count = static_cast<int>(o.integer("loss_frame_count", cfg.loss_frame_count));
  cfg.reacquire_attempts = static_cast<int>(o.integer("reacquire_attempts", cfg.reacquire_attempts));
  cfg.start_hint = parse_start_hint(o.string("start_hint", "prediction"), o.key_path("start_hint"));

  if (o.has("detector")) {
    Obj d(o.at("detector"), o.key_path("detector"));
    cfg.detector.threshold = static_cast<int>(d.integer("threshold", cfg.detector.threshold));
    cfg.detector.min_blob_pixels = d.integer("min_blob_pixels", cfg.detector.min_blob_pixels);
    cfg.detector.variance_floor = d.number("variance_floor", cfg.detector.variance_floor);
    cfg.detector.min_peak_correlation = d.number("min_peak_correlation", cfg.detector.min_peak_correlation);
    d.finish();
  }
  if (o.has("led_id")) {
    Obj l(o.at("led_id"), o.key_path("led_id"));
    cfg.id_table.tolerance_rows = l.number("tolerance_rows", cfg.id_table.tolerance_rows);
    if (l.has("table")) {
      const std::string path = l.key_path("table");
      const json& table = array_at(l.at("table"), path);
      cfg.id_table.entries.clear();
      for (std::size_t i = 0; i < table.size(); ++i) {
        Obj e(table[i], index_path(path, i));
        cfg.id_table.entries.push_back(
            {static_cast<int>(e.integer("period_rows")), static_cast<int>(e.integer("lamp_id"))});
        e.finish();
      }
    }
    l.finish();
  }
  if (o.has("camshift")) {
    Obj c(o.at("camshift"), o.key_path("camshift"));
    cfg.camshift.bins = static_cast<int>(c.integer("bins", cfg.camshift.bins));
    cfg.camshift.max_iterations = static_cast<int>(c.integer("max_iterations", cfg.camshift.max_iterations));
    cfg.camshift.eps_px = c.number("eps_px", cfg.camshift.eps_px);
    cfg.camshift.search_margin = c.number("search_margin", cfg.camshift.search_margin);
    cfg.camshift.min_half_extent = c.number("min_half_extent", cfg.camshift.min_half_extent);
    c.finish();
  }
  if (o.has("ukf")) {
    Obj u(o.at("ukf"), o.key_path("ukf"));
    cfg.ut.alpha = u.number("alpha", cfg.ut.alpha);
    cfg.ut.beta = u.number("beta", cfg.ut.beta);
    cfg.ut.kappa = u.number("kappa", cfg.ut.kappa);
    if (u.has("process_noise")) {
      const auto q = numbers(u.at("process_noise"), u.key_path("process_noise"), kJointDim);
      cfg.noise.process.setZero();
      for (int i = 0; i < kJointDim; ++i) cfg.noise.process(i, i) = q[static_cast<std::size_t>(i)];
    }
    if (u.has("measurement_noise")) {
      const auto r = numbers(u.at("measurement_noise"), u.key_path("measurement_noise"), 2);
      cfg.noise.measurement.setZero();
      cfg.noise.measurement(0, 0) = r[0];
      cfg.noise.measurement(1, 1) = r[1];
    }
    cfg.noise.scale_min = u.number("scale_min", cfg.noise.scale_min);
    cfg.noise.scale_max = u.number("scale_max", cfg.noise.scale_max);
    cfg.noise.reliability_floor = u.number("reliability_floor", cfg.noise.reliability_floor);
    cfg.noise.prior_position = u.number("prior_position", cfg.noise.prior_position);
    cfg.noise.prior_velocity = u.number("prior_velocity", cfg.noise.prior_velocity);
    u.finish();
  }
  o.finish();
}

}  // namespace config_detail

/// Scene plus tracker settings, as read from one configuration file.
struct RunConfig {
  SceneConfig scene;
  PipelineConfig pipeline;
};

/// LED-ID table built from the scene's modulated lamps.
inline LampIdTable id_table_from_scene(const SceneConfig& scene, double tolerance_rows = 2.0) {
  LampIdTable table;
  table.tolerance_rows = tolerance_rows;
  for (const auto& lamp : scene.lamps) {
    if (lamp.stripe_period_rows) table.entries.push_back({*lamp.stripe_period_rows, lamp.id});
  }
  return table;
}

inline RunConfig parse_run_config(const nlohmann::json& j) {
  using namespace config_detail;
  Obj root(j, "");
  check_version(root);
  RunConfig rc;
  SceneConfig& s = rc.scene;
  if (root.has("camera")) s.camera = parse_camera(Obj(root.at("camera"), "camera"));

  const json& lamps = array_at(root.at("lamps"), "lamps");
  for (std::size_t i = 0; i < lamps.size(); ++i) {
    s.lamps.push_back(parse_lamp(Obj(lamps[i], index_path("lamps", i))));
  }
  s.trajectory = parse_trajectory(Obj(root.at("trajectory"), "trajectory"));
  if (root.has("occlusions")) {
    const json& occ = array_at(root.at("occlusions"), "occlusions");
    for (std::size_t i = 0; i < occ.size(); ++i) {
      s.occlusions.push_back(parse_occlusion(Obj(occ[i], index_path("occlusions", i))));
    }
  }
  s.noise_sigma = root.number("noise_sigma", s.noise_sigma);
  s.dark_level = static_cast<int>(root.integer("dark_level", s.dark_level));
  s.fps = root.number("fps", s.fps);
  if (root.has("seed")) {
    const json& seed = root.at("seed");
    if (!seed.is_number_unsigned()) throw SchemaError("seed", "expected a non-negative integer");
    s.seed = seed.get<std::uint64_t>();
  }
  s.rows_per_second = root.number("rows_per_second", s.rows_per_second);
  s.jitter_sigma_cm = root.number("jitter_sigma_cm", s.jitter_sigma_cm);

  PipelineConfig& p = rc.pipeline;
  p.id_table = id_table_from_scene(s);
  if (root.has("tracking")) parse_tracking(Obj(root.at("tracking"), "tracking"), p);
  root.finish();

  validated("scene", [&] { s.validate(); });
  p.camera = s.camera;
  for (int k = 0; k < 2; ++k) {
    const LampSpec* lamp = s.find_lamp(p.wanted[k]);
    if (!lamp) throw SchemaError("tracking.lamps", "lamp " + std::to_string(p.wanted[k]) + " is not in lamps");
    p.lamp_positions[k] = lamp->position;
  }
  validated("tracking", [&] { p.validate(); });
  return rc;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Schema, path.string() + ": " + e.what());
  }
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_json_file(path));
}

/// Fully resolved configuration; parses back to the same RunConfig.
inline nlohmann::json to_json(const RunConfig& rc) {
  using nlohmann::json;
  const SceneConfig& s = rc.scene;
  const PipelineConfig& p = rc.pipeline;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["camera"] = {{"focal_length_mm", s.camera.focal_length * 1e3},
                 {"pixel_pitch_um", {s.camera.pixel_pitch_x * 1e6, s.camera.pixel_pitch_y * 1e6}},
                 {"width", s.camera.width},
                 {"height", s.camera.height},
                 {"principal_point", {s.camera.principal_point.u, s.camera.principal_point.v}}};
  j["lamps"] = json::array();
  for (const auto& l : s.lamps) {
    json lj = {{"id", l.id},
               {"position", {l.position.x, l.position.y, l.position.z}},
               {"radius_cm", l.radius_cm},
               {"on", l.on_intensity},
               {"off", l.off_intensity}};
    lj["stripe_period_rows"] = l.stripe_period_rows ? json(*l.stripe_period_rows) : json(nullptr);
    j["lamps"].push_back(lj);
  }
  json wps = json::array();
  for (const auto& w : s.trajectory.waypoints) wps.push_back({w.x, w.y, w.z});
  j["trajectory"] = {{"waypoints", wps}, {"speed_cm_s", s.trajectory.speed_cm_s}, {"dwell_s", s.trajectory.dwell_s}};
  j["occlusions"] = json::array();
  for (const auto& ev : s.occlusions) {
    j["occlusions"].push_back({{"lamp_id", ev.lamp_id},
                               {"first_frame", ev.first_frame},
                               {"last_frame", ev.last_frame},
                               {"fraction", ev.target_fraction},
                               {"side", config_detail::side_name(ev.side)}});
  }
  j["noise_sigma"] = s.noise_sigma;
  j["dark_level"] = s.dark_level;
  j["fps"] = s.fps;
  j["seed"] = s.seed;
  j["rows_per_second"] = s.rows_per_second;
  j["jitter_sigma_cm"] = s.jitter_sigma_cm;

  json table = json::array();
  for (const auto& e : p.id_table.entries) table.push_back({{"period_rows", e.period_rows}, {"lamp_id", e.lamp_id}});
  json q = json::array();
  for (int i = 0; i < kJointDim; ++i) q.push_back(p.noise.process(i, i));
  j["tracking"] = {
      {"lamps", {p.wanted[0], p.wanted[1]}},
      {"loss_area_ratio", p.loss_area_ratio},
      {"loss_frame_count", p.loss_frame_count},
      {"reacquire_attempts", p.reacquire_attempts},
      {"start_hint", p.start_hint == StartHint::Prediction ? "prediction" : "previous_centroid"},
      {"detector",
       {{"threshold", p.detector.threshold},
        {"min_blob_pixels", p.detector.min_blob_pixels},
        {"variance_floor", p.detector.variance_floor},
        {"min_peak_correlation", p.detector.min_peak_correlation}}},
      {"led_id", {{"tolerance_rows", p.id_table.tolerance_rows}, {"table", table}}},
      {"camshift",
       {{"bins", p.camshift.bins},
        {"max_iterations", p.camshift.max_iterations},
        {"eps_px", p.camshift.eps_px},
        {"search_margin", p.camshift.search_margin},
        {"min_half_extent", p.camshift.min_half_extent}}},
      {"ukf",
       {{"alpha", p.ut.alpha},
        {"beta", p.ut.beta},
        {"kappa", p.ut.kappa},
        {"process_noise", q},
        {"measurement_noise", {p.noise.measurement(0, 0), p.noise.measurement(1, 1)}},
        {"scale_min", p.noise.scale_min},
        {"scale_max", p.noise.scale_max},
        {"reliability_floor", p.noise.reliability_floor},
        {"prior_position", p.noise.prior_position},
        {"prior_velocity", p.noise.prior_velocity}}}};
  return j;
}

// Bench scenario file:
//   {
//     "schema_version": 1,
//     "occlusion": {"fractions", "both_lamps_fractions", "frames", "start_frame", "side", "noise_sigma"},
//     "heights":   {"heights_cm", "focal_length_mm", "waypoints", "speed_cm_s", "noise_sigma"}
//   }
// Height-sweep waypoints are [x, y] pairs; z follows from each height.
struct HeightExperiment {
  HeightSweepSpec sweep;
  std::optional<double> focal_length_mm;
  std::vector<PlanarPoint> waypoints;
  std::optional<double> speed_cm_s;
  std::optional<double> noise_sigma;
};

struct OcclusionExperiment {
  OcclusionSweepSpec sweep;
  std::optional<double> noise_sigma;
};

struct ScenarioSpec {
  std::optional<OcclusionExperiment> occlusion;
  std::optional<HeightExperiment> heights;
};

inline ScenarioSpec parse_scenarios(const nlohmann::json& j) {
  using namespace config_detail;
  Obj root(j, "");
  check_version(root);
  ScenarioSpec spec;
  if (root.has("occlusion")) {
    Obj o(root.at("occlusion"), "occlusion");
    OcclusionExperiment ex;
    if (o.has("fractions")) ex.sweep.fractions = numbers(o.at("fractions"), o.key_path("fractions"));
    ex.sweep.both_lamps_fractions.clear();
    if (o.has("both_lamps_fractions")) {
      ex.sweep.both_lamps_fractions = numbers(o.at("both_lamps_fractions"), o.key_path("both_lamps_fractions"));
    }
    ex.sweep.frames = o.integer("frames", ex.sweep.frames);
    ex.sweep.start_frame = o.integer("start_frame", ex.sweep.start_frame);
    ex.sweep.side = parse_side(o.string("side", "left"), o.key_path("side"));
    if (o.has("noise_sigma")) ex.noise_sigma = o.number("noise_sigma");
    o.finish();
    for (const auto& list : {ex.sweep.fractions, ex.sweep.both_lamps_fractions}) {
      for (double f : list) {
        if (!(f >= 0.2 && f <= 0.9)) throw SchemaError("occlusion.fractions", "fractions must lie in [0.2, 0.9]");
      }
    }
    spec.occlusion = ex;
  }
  if (root.has("heights")) {
    Obj o(root.at("heights"), "heights");
    HeightExperiment ex;
    if (o.has("heights_cm")) ex.sweep.heights_cm = numbers(o.at("heights_cm"), o.key_path("heights_cm"));
    if (o.has("focal_length_mm")) ex.focal_length_mm = o.number("focal_length_mm");
    if (o.has("waypoints")) {
      const std::string path = o.key_path("waypoints");
      const json& wps = array_at(o.at("waypoints"), path);
      for (std::size_t i = 0; i < wps.size(); ++i) {
        const auto n = numbers(wps[i], index_path(path, i), 2);
        ex.waypoints.push_back({n[0], n[1]});
      }
    }
    if (o.has("speed_cm_s")) ex.speed_cm_s = o.number("speed_cm_s");
    if (o.has("noise_sigma")) ex.noise_sigma = o.number("noise_sigma");
    o.finish();
    for (double h : ex.sweep.heights_cm) {
      if (!(h > 0.0)) throw SchemaError("heights.heights_cm", "heights must be positive");
    }
    spec.heights = ex;
  }
  root.finish();
  if (!spec.occlusion && !spec.heights) throw SchemaError("$", "no experiment requested");
  return spec;
}

inline ScenarioSpec load_scenarios(const std::filesystem::path& path) {
  return parse_scenarios(read_json_file(path));
}

}  // namespace vlp
