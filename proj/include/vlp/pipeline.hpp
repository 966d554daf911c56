#pragma once

// Per-frame tracking and positioning loop:
//   acquire (LED-ID) -> UKF predict -> Cam-shift from the prediction ->
//   reliability-weighted UKF update -> double-lamp position.
// A lamp whose area factor stays below a fraction of its initial value for
// too many frames is declared lost and re-acquired from a full-frame search.

#include <array>
#include <chrono>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "vlp/camshift.hpp"
#include "vlp/detector.hpp"
#include "vlp/error.hpp"
#include "vlp/frame.hpp"
#include "vlp/geometry.hpp"
#include "vlp/ukf.hpp"

namespace vlp {

enum class StartHint {
  Prediction,        // UKF predicted centroid
  PreviousCentroid,  // last converged Cam-shift centroid
};

struct PipelineConfig {
  std::array<int, 2> wanted{1, 2};
  std::array<WorldPoint, 2> lamp_positions{};
  CameraIntrinsics camera;
  double loss_area_ratio = 0.2;
  int loss_frame_count = 5;
  // Failed single-lamp re-acquisitions tolerated before both lamps restart.
  int reacquire_attempts = 10;
  DetectorParams detector;
  LampIdTable id_table;
  CamshiftParams camshift;
  UtParams ut;
  NoiseModel noise;
  StartHint start_hint = StartHint::Prediction;

  double lamp_separation_cm() const {
    return std::hypot(lamp_positions[1].x - lamp_positions[0].x,
                      lamp_positions[1].y - lamp_positions[0].y);
  }

  void validate() const {
    camera.validate();
    if (wanted[0] == wanted[1]) throw Error(ErrorKind::InvalidConfig, "wanted lamps must be distinct");
    if (!(loss_area_ratio > 0.0 && loss_area_ratio < 1.0)) {
      throw Error(ErrorKind::InvalidConfig, "loss area ratio must lie in (0, 1)");
    }
    if (loss_frame_count < 1) throw Error(ErrorKind::InvalidConfig, "loss frame count must be >= 1");
    if (reacquire_attempts < 1) throw Error(ErrorKind::InvalidConfig, "reacquire attempts must be >= 1");
    if (!(lamp_separation_cm() > 0.0)) {
      throw Error(ErrorKind::InvalidConfig, "tracked lamps must be horizontally separated");
    }
    id_table.validate();
    noise.validate();
  }
};

enum class SlotStatus { Uninitialized, Tracking, Lost };

struct TrackerSlot {
  int lamp_id = 0;
  TrackState track;
  int low_area_frames = 0;
  SlotStatus status = SlotStatus::Uninitialized;
  long reference_pixels = 0;
};

/// Loss bookkeeping after one Cam-shift step; a lost target counts as area 0.
inline TrackerSlot update_loss_state(TrackerSlot slot, const TrackResult& result,
                                     double loss_area_ratio, int loss_frame_count) {
  const double ratio = (result.lost || !(slot.track.initial_area > 0.0))
                           ? 0.0
                           : result.area_factor / slot.track.initial_area;
  if (ratio < loss_area_ratio) {
    ++slot.low_area_frames;
  } else {
    slot.low_area_frames = 0;
  }
  if (slot.low_area_frames > loss_frame_count) slot.status = SlotStatus::Lost;
  return slot;
}

struct TerminalEstimate {
  double x_cm = 0.0;
  double y_cm = 0.0;
  double height_cm = 0.0;  // sensor to lamp plane
};

/// Double-lamp position from the two lamp centroids.
inline TerminalEstimate solve_position(PixelPoint lamp1, PixelPoint lamp2, const PipelineConfig& cfg) {
  const ImagePoint i1 = pixel_to_image(lamp1, cfg.camera);
  const ImagePoint i2 = pixel_to_image(lamp2, cfg.camera);
  const double h = estimate_height(cfg.camera.focal_length, cfg.lamp_separation_cm(), image_distance(i1, i2));
  const PlanarPoint p = locate_terminal(i1, i2, cfg.lamp_positions[0], cfg.lamp_positions[1], h,
                                        cfg.camera.focal_length);
  return {p.x, p.y, h};
}

enum class FixStatus { Fix, Acquiring, Degraded };

inline const char* to_string(FixStatus s) {
  switch (s) {
    case FixStatus::Fix: return "Fix";
    case FixStatus::Acquiring: return "Acquiring";
    case FixStatus::Degraded: return "Degraded";
  }
  return "?";
}

struct LampReport {
  int id = 0;
  PixelPoint centroid;  // fused (posterior) centroid
  double rho = 0.0;
  bool tracking = false;
  // Diagnostics from this frame's Cam-shift step, when one ran.
  std::optional<PixelPoint> measured;
  int iterations = 0;
  double area_ratio = 0.0;
};

struct PositionFix {
  long frame_index = 0;
  double timestamp = 0.0;
  FixStatus status = FixStatus::Acquiring;
  std::optional<TerminalEstimate> position;
  bool stale = false;  // position carried over from an earlier Fix
  std::vector<LampReport> lamps;
  double proc_ms = 0.0;
};

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config) : cfg_(std::move(config)) {
    cfg_.validate();
    for (int k = 0; k < 2; ++k) slots_[k].lamp_id = cfg_.wanted[k];
  }

  PositionFix process_frame(const Frame& frame) {
    PositionFix fix;
    fix.frame_index = frame.frame_index;
    fix.timestamp = frame.timestamp;
    try {
      if (!initialized_) {
        acquire_all(frame, fix);
      } else {
        track(frame, fix);
      }
    } catch (const Error&) {
      // Numerical breakdown: start over from acquisition on the next frame.
      initialized_ = false;
      for (auto& slot : slots_) slot.status = SlotStatus::Uninitialized;
      fix.status = FixStatus::Acquiring;
      fix.lamps.clear();
    }
    if (fix.status == FixStatus::Fix) {
      last_position_ = fix.position;
    } else if (last_position_) {
      fix.position = last_position_;
      fix.stale = true;
    }
    return fix;
  }

  /// Processes every frame in order; `proc_ms` covers process_frame only.
  template <class FrameRange>
  std::vector<PositionFix> run(const FrameRange& frames) {
    std::vector<PositionFix> out;
    for (const Frame& frame : frames) out.push_back(timed(frame));
    return out;
  }

  PositionFix timed(const Frame& frame) {
    const auto t0 = std::chrono::steady_clock::now();
    PositionFix fix = process_frame(frame);
    const auto t1 = std::chrono::steady_clock::now();
    fix.proc_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return fix;
  }

  const std::array<TrackerSlot, 2>& slots() const { return slots_; }
  const JointState& state() const { return state_; }
  const PipelineConfig& config() const { return cfg_; }

 private:
  void acquire_all(const Frame& frame, PositionFix& fix) {
    const auto acq = acquire(frame, cfg_.id_table, {cfg_.wanted[0], cfg_.wanted[1]}, cfg_.detector);
    if (!acq.complete) {
      fix.status = FixStatus::Acquiring;
      return;
    }
    std::array<PixelPoint, 2> centroids;
    for (int k = 0; k < 2; ++k) centroids[k] = seed_slot(k, frame, acq.lamps.at(cfg_.wanted[k]));
    state_ = initialize(centroids[0], centroids[1], cfg_.noise);
    initialized_ = true;
    failed_reacquisitions_ = 0;
    for (int k = 0; k < 2; ++k) {
      LampReport rep;
      rep.id = cfg_.wanted[k];
      rep.centroid = centroids[k];
      rep.rho = 1.0;
      rep.tracking = true;
      rep.measured = centroids[k];
      rep.area_ratio = 1.0;
      fix.lamps.push_back(rep);
    }
    fix.position = solve_position(centroids[0], centroids[1], cfg_);
    fix.status = FixStatus::Fix;
  }

  /// Builds the slot's target model from `blob` and returns the Cam-shift
  /// centroid reached from the blob's intensity centroid.
  PixelPoint seed_slot(int k, const Frame& frame, const Blob& blob) {
    auto& slot = slots_[k];
    slot.track = init_track(frame, blob, cfg_.camshift);
    slot.low_area_frames = 0;
    slot.status = SlotStatus::Tracking;
    slot.reference_pixels = blob.pixel_count;
    const TrackResult res = track_step(frame, slot.track, blob.intensity_centroid, cfg_.camshift);
    return res.lost ? blob.intensity_centroid : res.centroid;
  }

  void track(const Frame& frame, PositionFix& fix) {
    state_ = predict(state_, cfg_.noise.process, cfg_.ut);

    std::array<LampReport, 2> reports;
    std::array<bool, 2> reacquired{false, false};
    bool any_attempt_failed = false;
    for (int k = 0; k < 2; ++k) {
      reports[k].id = cfg_.wanted[k];
      if (slots_[k].status != SlotStatus::Lost) continue;
      // A returning lamp must show at least the area that would keep it alive.
      const auto acq = acquire(frame, cfg_.id_table, {cfg_.wanted[k]}, cfg_.detector);
      const auto it = acq.lamps.find(cfg_.wanted[k]);
      const double needed = cfg_.loss_area_ratio * static_cast<double>(slots_[k].reference_pixels);
      if (it != acq.lamps.end() && static_cast<double>(it->second.pixel_count) >= needed) {
        const PixelPoint c = seed_slot(k, frame, it->second);
        reset_lamp(state_, k, c, cfg_.noise);
        reacquired[k] = true;
        reports[k].measured = c;
        reports[k].rho = 1.0;
        reports[k].area_ratio = 1.0;
      } else {
        any_attempt_failed = true;
      }
    }
    if (any_attempt_failed && ++failed_reacquisitions_ >= cfg_.reacquire_attempts) {
      initialized_ = false;  // full acquisition next frame
      failed_reacquisitions_ = 0;
    } else if (!any_attempt_failed) {
      failed_reacquisitions_ = 0;
    }

    std::array<LampMeasurement, 2> z;
    for (int k = 0; k < 2; ++k) {
      auto& slot = slots_[k];
      if (slot.status != SlotStatus::Tracking || reacquired[k]) continue;
      const PixelPoint hint =
          cfg_.start_hint == StartHint::Prediction ? state_.lamp(k) : slot.track.window.center;
      const TrackResult res = track_step(frame, slot.track, hint, cfg_.camshift);
      slot = update_loss_state(slot, res, cfg_.loss_area_ratio, cfg_.loss_frame_count);
      reports[k].iterations = res.iterations;
      reports[k].rho = res.lost ? 0.0 : res.similarity;
      reports[k].area_ratio = res.lost ? 0.0 : res.area_factor / slot.track.initial_area;
      if (!res.lost) reports[k].measured = res.centroid;
      if (!res.lost && slot.status == SlotStatus::Tracking) {
        z[k].centroid = res.centroid;
        z[k].scale = reliability_scale(res.similarity, cfg_.noise);
      }
    }
    state_ = update(state_, z, cfg_.noise.measurement, cfg_.ut).state;

    for (int k = 0; k < 2; ++k) {
      reports[k].centroid = state_.lamp(k);
      reports[k].tracking = slots_[k].status == SlotStatus::Tracking;
      fix.lamps.push_back(reports[k]);
    }
    if (slots_[0].status == SlotStatus::Tracking && slots_[1].status == SlotStatus::Tracking) {
      fix.position = solve_position(state_.lamp(0), state_.lamp(1), cfg_);
      fix.status = FixStatus::Fix;
    } else {
      fix.status = FixStatus::Degraded;
    }
  }

  PipelineConfig cfg_;
  std::array<TrackerSlot, 2> slots_;
  JointState state_;
  bool initialized_ = false;
  int failed_reacquisitions_ = 0;
  std::optional<TerminalEstimate> last_position_;
};

}  // namespace vlp
