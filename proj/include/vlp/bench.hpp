#pragma once

// Experiment harness: a full-frame detection baseline, paired scenario runs
// against simulator ground truth, occlusion and height sweeps, and CSV/JSON
// report files.

#include <nlohmann/json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vlp/detector.hpp"
#include "vlp/error.hpp"
#include "vlp/geometry.hpp"
#include "vlp/pipeline.hpp"
#include "vlp/scene.hpp"

namespace vlp {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Pixel-intensity detection on every frame: threshold, components, LED-ID,
/// intensity centroids. No state is carried between frames.
class BaselineTracker {
 public:
  explicit BaselineTracker(PipelineConfig config) : cfg_(std::move(config)) { cfg_.validate(); }

  PositionFix process_frame(const Frame& frame) const {
    PositionFix fix;
    fix.frame_index = frame.frame_index;
    fix.timestamp = frame.timestamp;
    const auto acq = acquire(frame, cfg_.id_table, {cfg_.wanted[0], cfg_.wanted[1]}, cfg_.detector);
    if (!acq.complete) return fix;
    std::array<PixelPoint, 2> c;
    for (int k = 0; k < 2; ++k) {
      c[k] = acq.lamps.at(cfg_.wanted[k]).intensity_centroid;
      LampReport rep;
      rep.id = cfg_.wanted[k];
      rep.centroid = c[k];
      rep.measured = c[k];
      rep.rho = 1.0;
      rep.tracking = true;
      rep.area_ratio = 1.0;
      fix.lamps.push_back(rep);
    }
    try {
      fix.position = solve_position(c[0], c[1], cfg_);
      fix.status = FixStatus::Fix;
    } catch (const Error&) {
      fix.lamps.clear();
    }
    return fix;
  }

  PositionFix timed(const Frame& frame) const {
    const auto t0 = std::chrono::steady_clock::now();
    PositionFix fix = process_frame(frame);
    const auto t1 = std::chrono::steady_clock::now();
    fix.proc_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return fix;
  }

  const PipelineConfig& config() const { return cfg_; }

 private:
  PipelineConfig cfg_;
};

template <class FrameRange>
std::vector<PositionFix> baseline_full_frame(const FrameRange& frames, const PipelineConfig& cfg) {
  const BaselineTracker baseline(cfg);
  std::vector<PositionFix> out;
  for (const Frame& frame : frames) out.push_back(baseline.timed(frame));
  return out;
}

struct SampleStats {
  std::size_t count = 0;
  double mean = kNaN;
  double p90 = kNaN;
};

inline SampleStats summarize(std::span<const double> samples) {
  SampleStats s;
  s.count = samples.size();
  if (samples.empty()) return s;
  s.mean = mean(samples);
  s.p90 = percentile(samples, 0.9);
  return s;
}

/// Terminal position of a fix in world coordinates (z from the lamp plane).
inline WorldPoint fix_world_position(const TerminalEstimate& est, const PipelineConfig& cfg) {
  const double lamp_z = 0.5 * (cfg.lamp_positions[0].z + cfg.lamp_positions[1].z);
  return {est.x_cm, est.y_cm, lamp_z - est.height_cm};
}

/// Planar error of the double-lamp solution when the lamps flagged in
/// `use_tracked` take their tracked centroids and the others their exact image
/// positions.
inline double substituted_tracking_error(const std::array<PixelPoint, 2>& tracked,
                                         std::array<bool, 2> use_tracked, const GroundTruth& truth,
                                         const PipelineConfig& cfg) {
  const LampTruth* a = truth.find(cfg.wanted[0]);
  const LampTruth* b = truth.find(cfg.wanted[1]);
  if (!a || !b || !a->in_view || !b->in_view) return kNaN;
  std::array<PixelPoint, 2> c{a->centroid, b->centroid};
  const TerminalEstimate exact = solve_position(c[0], c[1], cfg);
  for (int k = 0; k < 2; ++k) {
    if (use_tracked[k]) c[k] = tracked[k];
  }
  try {
    const TerminalEstimate est = solve_position(c[0], c[1], cfg);
    return tracking_error({est.x_cm, est.y_cm}, {exact.x_cm, exact.y_cm});
  } catch (const Error&) {
    return kNaN;
  }
}

/// Tracking error of lamp slot `k` alone, the other lamp taken as exact.
inline double lamp_tracking_error(int k, PixelPoint tracked, const GroundTruth& truth,
                                  const PipelineConfig& cfg) {
  std::array<PixelPoint, 2> c{tracked, tracked};
  std::array<bool, 2> use{k == 0, k == 1};
  return substituted_tracking_error(c, use, truth, cfg);
}

struct FrameEvaluation {
  long frame_index = 0;
  double timestamp = 0.0;
  bool evaluated = false;
  FixStatus status = FixStatus::Acquiring;
  FixStatus baseline_status = FixStatus::Acquiring;
  std::array<double, 2> pixel_offset{kNaN, kNaN};
  std::array<double, 2> tracking_cm{kNaN, kNaN};
  // Both lamps' tracked centroids in one solution.
  double joint_tracking_cm = kNaN;
  double positioning_cm = kNaN;
  double baseline_positioning_cm = kNaN;
  std::array<double, 2> baseline_pixel_offset{kNaN, kNaN};
  double proc_ms = 0.0;
  double baseline_ms = kNaN;
  int iterations = 0;
  bool any_lost = false;
};

inline FrameEvaluation evaluate_frame(const PositionFix& fix, const GroundTruth& truth,
                                      const PipelineConfig& cfg) {
  FrameEvaluation ev;
  ev.frame_index = fix.frame_index;
  ev.timestamp = fix.timestamp;
  ev.status = fix.status;
  ev.proc_ms = fix.proc_ms;
  if (fix.status != FixStatus::Acquiring && fix.lamps.size() == 2) {
    for (int k = 0; k < 2; ++k) {
      const LampReport& rep = fix.lamps[static_cast<std::size_t>(k)];
      ev.iterations += rep.iterations;
      if (!rep.tracking) ev.any_lost = true;
      const LampTruth* lt = truth.find(rep.id);
      if (!lt || !lt->in_view) continue;
      ev.pixel_offset[k] = std::hypot(rep.centroid.u - lt->centroid.u, rep.centroid.v - lt->centroid.v);
      ev.tracking_cm[k] = lamp_tracking_error(k, rep.centroid, truth, cfg);
    }
    ev.joint_tracking_cm = substituted_tracking_error({fix.lamps[0].centroid, fix.lamps[1].centroid},
                                                      {true, true}, truth, cfg);
  }
  if (fix.status == FixStatus::Fix && fix.position && !fix.stale) {
    ev.positioning_cm = positioning_error_3d(fix_world_position(*fix.position, cfg), truth.terminal_position);
  }
  return ev;
}

inline void add_baseline(FrameEvaluation& ev, const PositionFix& fix, const GroundTruth& truth,
                         const PipelineConfig& cfg) {
  ev.baseline_status = fix.status;
  ev.baseline_ms = fix.proc_ms;
  if (fix.status != FixStatus::Fix || !fix.position) return;
  ev.baseline_positioning_cm =
      positioning_error_3d(fix_world_position(*fix.position, cfg), truth.terminal_position);
  for (int k = 0; k < 2; ++k) {
    const LampReport& rep = fix.lamps[static_cast<std::size_t>(k)];
    if (const LampTruth* lt = truth.find(rep.id); lt && lt->in_view) {
      ev.baseline_pixel_offset[k] =
          std::hypot(rep.centroid.u - lt->centroid.u, rep.centroid.v - lt->centroid.v);
    }
  }
}

struct ScenarioMeta {
  std::string name;
  double occlusion_fraction = 0.0;
  std::vector<int> occluded_lamps;
  double noise_sigma = 0.0;
  double height_cm = kNaN;  // nominal sensor-to-lamp height, when fixed
  long eval_first = 0;
  long eval_last = -1;      // inclusive; -1 = through the last frame
};

struct ScenarioReport {
  ScenarioMeta meta;
  std::vector<FrameEvaluation> frames;
  // Single occluded lamp: that lamp's error. Both occluded: the joint error.
  // No occlusion: both lamps' individual errors pooled.
  std::vector<double> tracking_cm;
  std::vector<double> positioning_cm;
  std::vector<double> baseline_positioning_cm;
  std::vector<double> pixel_offset;
  SampleStats tracking;
  SampleStats positioning;
  SampleStats baseline_positioning;
  SampleStats pixel;
  double pipeline_mean_ms = kNaN;
  double baseline_mean_ms = kNaN;
  double mean_iterations = kNaN;
  long lost_frames = 0;
  bool skipped = false;
  bool failed = false;
  std::string message;
};

/// Recomputes samples and statistics from the per-frame rows.
inline void finalize(ScenarioReport& report, const PipelineConfig& cfg) {
  report.tracking_cm.clear();
  report.positioning_cm.clear();
  report.baseline_positioning_cm.clear();
  report.pixel_offset.clear();
  report.lost_frames = 0;
  std::array<bool, 2> occluded{false, false};
  for (int k = 0; k < 2; ++k) {
    occluded[k] = std::find(report.meta.occluded_lamps.begin(), report.meta.occluded_lamps.end(),
                            cfg.wanted[k]) != report.meta.occluded_lamps.end();
  }
  const bool joint = occluded[0] && occluded[1];
  const std::array<bool, 2> subject = (occluded[0] || occluded[1]) ? occluded : std::array<bool, 2>{true, true};
  std::vector<double> proc, base;
  double iterations = 0.0;
  long tracked_frames = 0;
  for (const auto& ev : report.frames) {
    proc.push_back(ev.proc_ms);
    if (std::isfinite(ev.baseline_ms)) base.push_back(ev.baseline_ms);
    if (!ev.evaluated) continue;
    if (ev.any_lost) ++report.lost_frames;
    if (ev.status != FixStatus::Acquiring) {
      iterations += ev.iterations;
      ++tracked_frames;
    }
    if (joint && std::isfinite(ev.joint_tracking_cm)) report.tracking_cm.push_back(ev.joint_tracking_cm);
    for (int k = 0; k < 2; ++k) {
      if (!subject[k]) continue;
      if (!joint && std::isfinite(ev.tracking_cm[k])) report.tracking_cm.push_back(ev.tracking_cm[k]);
      if (std::isfinite(ev.pixel_offset[k])) report.pixel_offset.push_back(ev.pixel_offset[k]);
    }
    if (std::isfinite(ev.positioning_cm)) report.positioning_cm.push_back(ev.positioning_cm);
    if (std::isfinite(ev.baseline_positioning_cm)) {
      report.baseline_positioning_cm.push_back(ev.baseline_positioning_cm);
    }
  }
  report.tracking = summarize(report.tracking_cm);
  report.positioning = summarize(report.positioning_cm);
  report.baseline_positioning = summarize(report.baseline_positioning_cm);
  report.pixel = summarize(report.pixel_offset);
  report.pipeline_mean_ms = proc.empty() ? kNaN : mean(proc);
  report.baseline_mean_ms = base.empty() ? kNaN : mean(base);
  report.mean_iterations = tracked_frames > 0 ? iterations / (2.0 * tracked_frames) : kNaN;
}

struct RunOptions {
  bool with_baseline = true;
};

/// Renders the scene once and feeds each frame to the pipeline and, on the
/// same frame, to the baseline. Only process_frame calls are timed.
inline ScenarioReport run_scenario(const SceneConfig& scene, const PipelineConfig& cfg, ScenarioMeta meta,
                                   const RunOptions& options = {}) {
  ScenarioReport report;
  report.meta = std::move(meta);
  report.meta.noise_sigma = scene.noise_sigma;
  SequenceGenerator frames(scene);
  Pipeline pipeline(cfg);
  const BaselineTracker baseline(cfg);
  const long last = report.meta.eval_last < 0 ? frames.frame_count() - 1 : report.meta.eval_last;
  while (auto item = frames.next()) {
    const auto& [frame, truth] = *item;
    FrameEvaluation ev = evaluate_frame(pipeline.timed(frame), truth, cfg);
    if (options.with_baseline) add_baseline(ev, baseline.timed(frame), truth, cfg);
    ev.evaluated = frame.frame_index >= report.meta.eval_first && frame.frame_index <= last;
    report.frames.push_back(ev);
  }
  finalize(report, cfg);
  return report;
}

struct ExperimentReport {
  std::string kind;
  std::vector<ScenarioReport> scenarios;
  // Positioning samples pooled over every scenario that ran.
  std::vector<double> aggregate_positioning_cm;
  SampleStats aggregate_positioning;
};

inline void finalize(ExperimentReport& report) {
  report.aggregate_positioning_cm.clear();
  for (const auto& s : report.scenarios) {
    report.aggregate_positioning_cm.insert(report.aggregate_positioning_cm.end(), s.positioning_cm.begin(),
                                           s.positioning_cm.end());
  }
  report.aggregate_positioning = summarize(report.aggregate_positioning_cm);
}

struct OcclusionSweepSpec {
  std::vector<double> fractions{0.3, 0.7};
  // Fractions at which both tracked lamps are covered at once.
  std::vector<double> both_lamps_fractions{0.7};
  long frames = 100;
  long start_frame = 10;
  OcclusionSide side = OcclusionSide::Left;
};

inline std::string fraction_tag(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d", static_cast<int>(std::lround(f * 100.0)));
  return buf;
}

template <class Fn>
void run_guarded(ScenarioReport& report, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report.failed = true;
    report.message = e.what();
  }
}

/// Control run plus one run per occlusion fraction on the first tracked lamp,
/// and one per both-lamps fraction.
inline ExperimentReport run_occlusion_sweep(const SceneConfig& base, const PipelineConfig& cfg,
                                            const OcclusionSweepSpec& spec = {}) {
  for (const auto& list : {spec.fractions, spec.both_lamps_fractions}) {
    for (double f : list) {
      if (!(f >= 0.2 && f <= 0.9)) {
        throw Error(ErrorKind::InvalidConfig, "occlusion fractions must lie in [0.2, 0.9]");
      }
    }
  }
  if (spec.frames < 1 || spec.start_frame < 0) {
    throw Error(ErrorKind::InvalidConfig, "occlusion window must be non-empty");
  }
  if (base.frame_count() < spec.start_frame + spec.frames) {
    throw Error(ErrorKind::InvalidConfig, "scene is too short for the occlusion window");
  }
  ExperimentReport report;
  report.kind = "occlusion";
  const long first = spec.start_frame;
  const long last = spec.start_frame + spec.frames - 1;

  const auto scenario = [&](std::string name, double fraction, std::vector<int> lamps) {
    ScenarioMeta meta;
    meta.name = std::move(name);
    meta.occlusion_fraction = fraction;
    meta.occluded_lamps = lamps;
    meta.eval_first = first;
    meta.eval_last = last;
    SceneConfig scene = base;
    scene.occlusions.clear();
    for (int id : lamps) scene.occlusions.push_back({id, first, last, fraction, spec.side});
    ScenarioReport out;
    out.meta = meta;
    run_guarded(out, [&] { out = run_scenario(scene, cfg, meta); });
    report.scenarios.push_back(std::move(out));
  };

  scenario("control", 0.0, {});
  for (double f : spec.fractions) scenario("single_" + fraction_tag(f), f, {cfg.wanted[0]});
  for (double f : spec.both_lamps_fractions) {
    scenario("both_" + fraction_tag(f), f, {cfg.wanted[0], cfg.wanted[1]});
  }
  finalize(report);
  return report;
}

struct HeightSweepSpec {
  std::vector<double> heights_cm{50.0, 55.0, 60.0, 65.0, 70.0};
};

/// True when both tracked lamps stay fully inside the frame for the whole run.
inline bool lamps_in_view(const SceneConfig& scene, const PipelineConfig& cfg) {
  const auto& cam = scene.camera;
  for (long i = 0; i < scene.frame_count(); ++i) {
    const WorldPoint pos = trajectory_position(scene.trajectory, std::min(scene.frame_time(i), scene.trajectory.duration()));
    for (int id : cfg.wanted) {
      const LampSpec* lamp = scene.find_lamp(id);
      if (!lamp) return false;
      const auto proj = project_lamp(*lamp, pos, cam);
      if (!proj) return false;
      const double r = proj->radius_px + 1.0;
      if (proj->centroid.u - r < 0.0 || proj->centroid.v - r < 0.0 ||
          proj->centroid.u + r > cam.width - 1 || proj->centroid.v + r > cam.height - 1) {
        return false;
      }
    }
  }
  return true;
}

/// One run per sensor-to-lamp height: the base trajectory is flattened to
/// z = lamp plane - H.
inline ExperimentReport run_height_sweep(const SceneConfig& base, const PipelineConfig& cfg,
                                         const HeightSweepSpec& spec = {}) {
  ExperimentReport report;
  report.kind = "height";
  const double lamp_z = 0.5 * (cfg.lamp_positions[0].z + cfg.lamp_positions[1].z);
  for (double h : spec.heights_cm) {
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidConfig, "sweep heights must be positive");
  }
  for (double h : spec.heights_cm) {
    ScenarioMeta meta;
    char name[32];
    std::snprintf(name, sizeof name, "height_%03d", static_cast<int>(std::lround(h)));
    meta.name = name;
    meta.height_cm = h;
    SceneConfig scene = base;
    scene.occlusions.clear();
    for (auto& wp : scene.trajectory.waypoints) wp.z = lamp_z - h;
    ScenarioReport out;
    out.meta = meta;
    out.meta.noise_sigma = scene.noise_sigma;
    run_guarded(out, [&] {
      if (!lamps_in_view(scene, cfg)) {
        out.skipped = true;
        out.message = "tracked lamp leaves the field of view";
        return;
      }
      out = run_scenario(scene, cfg, meta);
    });
    report.scenarios.push_back(std::move(out));
  }
  finalize(report);
  return report;
}

namespace detail {

inline std::string num(double x) {
  if (!std::isfinite(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline nlohmann::json stats_json(const SampleStats& s) {
  nlohmann::json j;
  j["count"] = s.count;
  j["mean"] = std::isfinite(s.mean) ? nlohmann::json(s.mean) : nlohmann::json(nullptr);
  j["p90"] = std::isfinite(s.p90) ? nlohmann::json(s.p90) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json finite_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

inline void write_cdf(const std::filesystem::path& path, const std::vector<double>& samples) {
  auto out = open_out(path);
  out << "x,F\n";
  if (samples.empty()) return;
  for (const auto& [x, f] : empirical_cdf(samples).table()) out << num(x) << ',' << num(f) << '\n';
}

}  // namespace detail

inline nlohmann::json summary_json(const ScenarioReport& r) {
  using detail::finite_or_null;
  nlohmann::json j;
  j["scenario"] = r.meta.name;
  j["occlusion_fraction"] = r.meta.occlusion_fraction;
  j["occluded_lamps"] = r.meta.occluded_lamps;
  j["noise_sigma"] = r.meta.noise_sigma;
  j["height_cm"] = finite_or_null(r.meta.height_cm);
  j["frames"] = r.frames.size();
  j["eval_first"] = r.meta.eval_first;
  j["eval_last"] = r.meta.eval_last;
  j["tracking_cm"] = detail::stats_json(r.tracking);
  j["positioning_cm"] = detail::stats_json(r.positioning);
  j["baseline_positioning_cm"] = detail::stats_json(r.baseline_positioning);
  j["pixel_offset"] = detail::stats_json(r.pixel);
  j["mean_iterations"] = finite_or_null(r.mean_iterations);
  j["lost_frames"] = r.lost_frames;
  j["timing"] = {{"pipeline_mean_ms", finite_or_null(r.pipeline_mean_ms)},
                 {"baseline_mean_ms", finite_or_null(r.baseline_mean_ms)},
                 {"ratio", finite_or_null(r.baseline_mean_ms / r.pipeline_mean_ms)}};
  j["skipped"] = r.skipped;
  j["failed"] = r.failed;
  j["message"] = r.message;
  return j;
}

/// Writes summary.json, errors.csv, cdf_tracking.csv, cdf_positioning.csv and
/// timing.csv for one scenario.
inline void emit_report(const ScenarioReport& r, const std::filesystem::path& dir) {
  using detail::num;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

  {
    auto out = detail::open_out(dir / "summary.json");
    out << summary_json(r).dump(2) << '\n';
  }
  {
    auto out = detail::open_out(dir / "errors.csv");
    out << "frame,t,evaluated,status,lamp1_px,lamp2_px,lamp1_tracking_cm,lamp2_tracking_cm,"
           "joint_tracking_cm,positioning_cm,baseline_status,baseline_positioning_cm\n";
    for (const auto& ev : r.frames) {
      out << ev.frame_index << ',' << num(ev.timestamp) << ',' << (ev.evaluated ? 1 : 0) << ','
          << to_string(ev.status) << ',' << num(ev.pixel_offset[0]) << ',' << num(ev.pixel_offset[1]) << ','
          << num(ev.tracking_cm[0]) << ',' << num(ev.tracking_cm[1]) << ',' << num(ev.joint_tracking_cm) << ','
          << num(ev.positioning_cm) << ','
          << to_string(ev.baseline_status) << ',' << num(ev.baseline_positioning_cm) << '\n';
    }
  }
  detail::write_cdf(dir / "cdf_tracking.csv", r.tracking_cm);
  detail::write_cdf(dir / "cdf_positioning.csv", r.positioning_cm);
  {
    auto out = detail::open_out(dir / "timing.csv");
    out << "frame,pipeline_ms,baseline_ms\n";
    for (const auto& ev : r.frames) {
      out << ev.frame_index << ',' << num(ev.proc_ms) << ',' << num(ev.baseline_ms) << '\n';
    }
  }
}

/// Per-scenario subdirectories plus comparison.csv, summary.json and one
/// aggregate positioning CDF per experiment (cdf_positioning_<kind>.csv).
inline void emit_experiments(const std::vector<ExperimentReport>& reports, const std::filesystem::path& dir) {
  using detail::num;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  auto out = detail::open_out(dir / "comparison.csv");
  out << "experiment,scenario,method,status,frames,mean_proc_ms,p90_tracking_cm,mean_positioning_cm,"
         "p90_positioning_cm\n";
  nlohmann::json summary;
  summary["experiments"] = nlohmann::json::array();
  for (const auto& report : reports) {
    nlohmann::json ej;
    ej["kind"] = report.kind;
    ej["aggregate_positioning_cm"] = detail::stats_json(report.aggregate_positioning);
    ej["scenarios"] = nlohmann::json::array();
    for (const auto& s : report.scenarios) {
      if (!s.failed && !s.skipped) emit_report(s, dir / s.meta.name);
      const char* status = s.failed ? "failed" : s.skipped ? "skipped" : "ok";
      out << report.kind << ',' << s.meta.name << ",pipeline," << status << ',' << s.frames.size() << ','
          << num(s.pipeline_mean_ms) << ',' << num(s.tracking.p90) << ',' << num(s.positioning.mean) << ','
          << num(s.positioning.p90) << '\n';
      out << report.kind << ',' << s.meta.name << ",baseline," << status << ',' << s.frames.size() << ','
          << num(s.baseline_mean_ms) << ",," << num(s.baseline_positioning.mean) << ','
          << num(s.baseline_positioning.p90) << '\n';
      ej["scenarios"].push_back(summary_json(s));
    }
    detail::write_cdf(dir / ("cdf_positioning_" + report.kind + ".csv"), report.aggregate_positioning_cm);
    summary["experiments"].push_back(ej);
  }
  auto sj = detail::open_out(dir / "summary.json");
  sj << summary.dump(2) << '\n';
}

}  // namespace vlp
