#pragma once

// The simulate / track / bench / report operations behind the vlp executable.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <string>
#include <vector>

#include "vlp/bench.hpp"
#include "vlp/config.hpp"
#include "vlp/error.hpp"
#include "vlp/frame.hpp"
#include "vlp/pipeline.hpp"
#include "vlp/records.hpp"
#include "vlp/scene.hpp"

namespace vlp {

namespace command_detail {

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

}  // namespace command_detail

struct SimulateSummary {
  long frames = 0;
};

/// Writes frame_%06d.pgm, groundtruth.jsonl and config.resolved.json.
inline SimulateSummary cmd_simulate(const RunConfig& rc, const std::filesystem::path& out_dir) {
  command_detail::ensure_dir(out_dir);
  {
    auto cfg = command_detail::open_out(out_dir / "config.resolved.json");
    cfg << to_json(rc).dump(2) << '\n';
  }
  auto truth_out = command_detail::open_out(out_dir / "groundtruth.jsonl");
  SequenceGenerator gen(rc.scene);
  SimulateSummary result;
  while (auto item = gen.next()) {
    const auto& [frame, truth] = *item;
    write_pgm(out_dir / frame_file_name(frame.frame_index), frame);
    truth_out << to_json(truth).dump() << '\n';
    ++result.frames;
  }
  if (!truth_out) throw Error(ErrorKind::Io, "cannot write " + (out_dir / "groundtruth.jsonl").string());
  return result;
}

struct FrameFile {
  long index = 0;
  std::filesystem::path path;
};

/// frame_NNNNNN.pgm files of a directory in frame order.
inline std::vector<FrameFile> list_frames(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorKind::Io, "not a directory: " + dir.string());
  static const std::regex pattern(R"(frame_(\d{6,})\.pgm)");
  std::vector<FrameFile> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) files.push_back({std::stol(m[1].str()), entry.path()});
  }
  std::sort(files.begin(), files.end(), [](const FrameFile& a, const FrameFile& b) { return a.index < b.index; });
  if (files.empty()) throw Error(ErrorKind::Io, "no frame_*.pgm files in " + dir.string());
  return files;
}

struct TrackSummary {
  long frames = 0;
  double mean_proc_ms = 0.0;
};

/// Runs the pipeline over a frame directory and writes fixes.jsonl, one line
/// per frame as each frame completes.
inline TrackSummary cmd_track(const RunConfig& rc, const std::filesystem::path& frames_dir,
                              const std::filesystem::path& out_dir) {
  const auto files = list_frames(frames_dir);
  command_detail::ensure_dir(out_dir);
  const auto fixes_path = out_dir / "fixes.jsonl";
  auto out = command_detail::open_out(fixes_path);
  Pipeline pipeline(rc.pipeline);
  TrackSummary result;
  double total_ms = 0.0;
  for (const auto& file : files) {
    Frame frame = read_pgm(file.path);
    if (frame.width != rc.scene.camera.width || frame.height != rc.scene.camera.height) {
      throw Error(ErrorKind::InvalidConfig, file.path.string() + ": frame size does not match the camera");
    }
    frame.frame_index = file.index;
    frame.timestamp = rc.scene.frame_time(file.index);
    const PositionFix fix = pipeline.timed(frame);
    out << to_json(fix).dump() << '\n' << std::flush;
    if (!out) throw Error(ErrorKind::Io, "cannot write " + fixes_path.string());
    total_ms += fix.proc_ms;
    ++result.frames;
  }
  result.mean_proc_ms = total_ms / static_cast<double>(result.frames);
  return result;
}

/// Scene and tracker configuration for the height sweep.
inline RunConfig height_run_config(RunConfig rc, const HeightExperiment& ex) {
  if (ex.focal_length_mm) {
    rc.scene.camera.focal_length = *ex.focal_length_mm * 1e-3;
    rc.pipeline.camera = rc.scene.camera;
  }
  if (!ex.waypoints.empty()) {
    rc.scene.trajectory.waypoints.clear();
    for (const auto& p : ex.waypoints) rc.scene.trajectory.waypoints.push_back({p.x, p.y, 0.0});
  }
  if (ex.speed_cm_s) rc.scene.trajectory.speed_cm_s = *ex.speed_cm_s;
  if (ex.noise_sigma) rc.scene.noise_sigma = *ex.noise_sigma;
  return rc;
}

/// Runs the requested sweeps and writes their reports under `out_dir`.
inline std::vector<ExperimentReport> cmd_bench(const RunConfig& rc, const ScenarioSpec& spec,
                                               const std::filesystem::path& out_dir) {
  std::vector<ExperimentReport> reports;
  if (spec.occlusion) {
    SceneConfig scene = rc.scene;
    if (spec.occlusion->noise_sigma) scene.noise_sigma = *spec.occlusion->noise_sigma;
    reports.push_back(run_occlusion_sweep(scene, rc.pipeline, spec.occlusion->sweep));
  }
  if (spec.heights) {
    const RunConfig hc = height_run_config(rc, *spec.heights);
    reports.push_back(run_height_sweep(hc.scene, hc.pipeline, spec.heights->sweep));
  }
  emit_experiments(reports, out_dir);
  return reports;
}

/// Scores an existing fixes.jsonl against the simulator's groundtruth.jsonl
/// and writes the report files to `<out>/report`.
inline ScenarioReport cmd_report(const RunConfig& rc, const std::filesystem::path& frames_dir,
                                 const std::filesystem::path& out_dir) {
  const auto truths = read_jsonl<GroundTruth>(frames_dir / "groundtruth.jsonl", truth_from_json);
  const auto fixes = read_jsonl<PositionFix>(out_dir / "fixes.jsonl", fix_from_json);
  std::map<long, const GroundTruth*> by_frame;
  for (const auto& t : truths) by_frame[t.frame_index] = &t;

  ScenarioReport report;
  report.meta.name = "report";
  report.meta.noise_sigma = rc.scene.noise_sigma;
  for (const auto& fix : fixes) {
    const auto it = by_frame.find(fix.frame_index);
    if (it == by_frame.end()) {
      throw Error(ErrorKind::Schema, "fix for frame " + std::to_string(fix.frame_index) + " has no ground truth");
    }
    FrameEvaluation ev = evaluate_frame(fix, *it->second, rc.pipeline);
    ev.evaluated = true;
    report.frames.push_back(ev);
  }
  finalize(report, rc.pipeline);
  emit_report(report, out_dir / "report");
  return report;
}

}  // namespace vlp
