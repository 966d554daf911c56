#pragma once

// Synthetic rolling-shutter scene: lamps on a ceiling plane, a camera looking
// straight up from a moving terminal, and exact per-frame ground truth.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "vlp/error.hpp"
#include "vlp/frame.hpp"
#include "vlp/geometry.hpp"

namespace vlp {

struct LampSpec {
  int id = 0;
  WorldPoint position;
  double radius_cm = 5.0;
  // Stripe period in image rows; empty for an unmodulated source.
  std::optional<int> stripe_period_rows;
  int on_intensity = 240;
  int off_intensity = 150;

  bool modulated() const { return stripe_period_rows.has_value(); }
};

struct Trajectory {
  std::vector<WorldPoint> waypoints;
  double speed_cm_s = 10.0;
  // Time spent parked at the last waypoint after the path is covered.
  double dwell_s = 0.0;

  double length() const {
    double total = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
      const auto& a = waypoints[i - 1];
      const auto& b = waypoints[i];
      total += std::sqrt((b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y) +
                         (b.z - a.z) * (b.z - a.z));
    }
    return total;
  }

  double duration() const { return length() / speed_cm_s + dwell_s; }
};

enum class OcclusionSide { Left, Right, Top, Bottom };

struct OcclusionEvent {
  int lamp_id = 0;
  long first_frame = 0;  // inclusive
  long last_frame = 0;   // inclusive
  double target_fraction = 0.5;
  OcclusionSide side = OcclusionSide::Left;

  bool active(long frame) const { return frame >= first_frame && frame <= last_frame; }
};

struct SceneConfig {
  CameraIntrinsics camera;
  std::vector<LampSpec> lamps;
  Trajectory trajectory;
  std::vector<OcclusionEvent> occlusions;
  double noise_sigma = 2.0;
  int dark_level = 10;
  double fps = 46.0;
  std::uint64_t seed = 1;
  double rows_per_second = 50000.0;
  // Optional vibration: per-axis Gaussian noise between the rendered camera
  // pose and the recorded terminal position.
  double jitter_sigma_cm = 0.0;

  const LampSpec* find_lamp(int id) const {
    for (const auto& lamp : lamps) {
      if (lamp.id == id) return &lamp;
    }
    return nullptr;
  }

  long frame_count() const {
    const double n = trajectory.duration() * fps;
    return std::max<long>(1, static_cast<long>(std::ceil(n - 1e-9)));
  }

  double frame_time(long index) const { return static_cast<double>(index) / fps; }

  void validate() const;
};

struct LampProjection {
  PixelPoint centroid;
  double radius_px = 0.0;
};

struct LampTruth {
  int id = 0;
  PixelPoint centroid;
  double radius_px = 0.0;
  double visible_area_fraction = 1.0;
  bool in_view = false;
};

struct GroundTruth {
  long frame_index = 0;
  double timestamp = 0.0;
  WorldPoint terminal_position;
  std::vector<LampTruth> lamps;

  const LampTruth* find(int id) const {
    for (const auto& lamp : lamps) {
      if (lamp.id == id) return &lamp;
    }
    return nullptr;
  }
};

/// Pinhole projection of a ceiling lamp seen from `camera_pos`; empty when the
/// disc lies entirely outside the frame.
inline std::optional<LampProjection> project_lamp(const LampSpec& lamp,
                                                  const WorldPoint& camera_pos,
                                                  const CameraIntrinsics& intr) {
  const double h = lamp.position.z - camera_pos.z;
  if (!(h > 0.0)) {
    throw Error(ErrorKind::InvalidGeometry, "lamp must be above the camera");
  }
  const ImagePoint img{-intr.focal_length * (lamp.position.x - camera_pos.x) / h,
                       -intr.focal_length * (lamp.position.y - camera_pos.y) / h};
  LampProjection proj;
  proj.centroid = image_to_pixel(img, intr);
  proj.radius_px = intr.focal_length * lamp.radius_cm / (h * intr.pixel_pitch_x);
  const auto& c = proj.centroid;
  const double r = proj.radius_px;
  if (c.u + r < 0.0 || c.v + r < 0.0 || c.u - r > intr.width - 1 || c.v - r > intr.height - 1) {
    return std::nullopt;
  }
  return proj;
}

inline WorldPoint trajectory_position(const Trajectory& traj, double t) {
  if (traj.waypoints.empty()) throw Error(ErrorKind::InvalidConfig, "trajectory has no waypoints");
  const double duration = traj.duration();
  if (!(t >= -1e-9 && t <= duration + 1e-9)) {
    throw Error(ErrorKind::OutOfRange, "time outside the trajectory");
  }
  double remaining = std::max(0.0, t) * traj.speed_cm_s;
  for (std::size_t i = 1; i < traj.waypoints.size(); ++i) {
    const auto& a = traj.waypoints[i - 1];
    const auto& b = traj.waypoints[i];
    const double seg = std::sqrt((b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y) +
                                 (b.z - a.z) * (b.z - a.z));
    if (remaining <= seg && seg > 0.0) {
      const double s = remaining / seg;
      return {a.x + s * (b.x - a.x), a.y + s * (b.y - a.y), a.z + s * (b.z - a.z)};
    }
    remaining -= seg;
  }
  return traj.waypoints.back();
}

namespace detail {

// Integer lattice of a projected disc: for each row, the inclusive column span.
struct DiscRaster {
  int first_row = 0;
  std::vector<std::pair<int, int>> spans;  // (first_col, last_col); empty when first > last

  long pixel_count() const {
    long n = 0;
    for (auto [a, b] : spans) n += std::max(0, b - a + 1);
    return n;
  }
};

inline DiscRaster rasterize_disc(PixelPoint c, double r) {
  DiscRaster disc;
  disc.first_row = static_cast<int>(std::ceil(c.v - r));
  const int last_row = static_cast<int>(std::floor(c.v + r));
  for (int row = disc.first_row; row <= last_row; ++row) {
    const double dv = row - c.v;
    const double half = std::sqrt(std::max(0.0, r * r - dv * dv));
    disc.spans.emplace_back(static_cast<int>(std::ceil(c.u - half)),
                            static_cast<int>(std::floor(c.u + half)));
  }
  return disc;
}

// Axis-aligned occluder grown from one side of the disc until the covered
// share of disc pixels is as close as possible to `fraction`.
struct OccluderRect {
  int min_u, max_u, min_v, max_v;
  bool covers(int u, int v) const { return u >= min_u && u <= max_u && v >= min_v && v <= max_v; }
};

inline OccluderRect grow_occluder(const DiscRaster& disc, double fraction, OcclusionSide side) {
  const long total = disc.pixel_count();
  int min_u = 0, max_u = -1;
  for (auto [a, b] : disc.spans) {
    if (a > b) continue;
    if (max_u < min_u) {
      min_u = a;
      max_u = b;
    } else {
      min_u = std::min(min_u, a);
      max_u = std::max(max_u, b);
    }
  }
  const int min_v = disc.first_row;
  const int max_v = disc.first_row + static_cast<int>(disc.spans.size()) - 1;
  const bool horizontal = side == OcclusionSide::Left || side == OcclusionSide::Right;

  // Pixel count per column (horizontal growth) or per row (vertical growth).
  const int lo = horizontal ? min_u : min_v;
  const int hi = horizontal ? max_u : max_v;
  std::vector<long> counts(static_cast<std::size_t>(std::max(0, hi - lo + 1)), 0);
  for (std::size_t i = 0; i < disc.spans.size(); ++i) {
    auto [a, b] = disc.spans[i];
    if (a > b) continue;
    if (horizontal) {
      for (int u = a; u <= b; ++u) ++counts[static_cast<std::size_t>(u - lo)];
    } else {
      counts[i] = b - a + 1;
    }
  }
  const bool from_low = side == OcclusionSide::Left || side == OcclusionSide::Top;
  const double target = fraction * static_cast<double>(total);
  long covered = 0;
  int best_len = 0;
  double best_gap = target;  // zero lines covered
  for (int len = 1; len <= static_cast<int>(counts.size()); ++len) {
    const std::size_t idx = from_low ? static_cast<std::size_t>(len - 1) : counts.size() - len;
    covered += counts[idx];
    const double gap = std::abs(static_cast<double>(covered) - target);
    if (gap < best_gap) {
      best_gap = gap;
      best_len = len;
    }
  }
  OccluderRect rect{min_u, max_u, min_v, max_v};
  if (best_len == 0) return {0, -1, 0, -1};
  if (horizontal) {
    if (from_low) rect.max_u = lo + best_len - 1;
    else rect.min_u = hi - best_len + 1;
  } else {
    if (from_low) rect.max_v = lo + best_len - 1;
    else rect.min_v = hi - best_len + 1;
  }
  return rect;
}

inline std::mt19937_64 frame_rng(std::uint64_t seed, long frame_index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(frame_index),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(frame_index) >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

// Noise is added to integer intensity levels and rounded, so sampling the
// rounded Gaussian directly gives the same distribution. Offsets are drawn
// by inverse CDF from a 16-bit uniform (probability resolution 2^-16).
class RoundedGaussianTable {
 public:
  explicit RoundedGaussianTable(double sigma) : table_(kSize) {
    const int k = static_cast<int>(std::ceil(8.0 * sigma)) + 1;
    const auto phi = [&](double x) { return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0))); };
    int offset = -k;
    for (std::size_t i = 0; i < kSize; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / kSize;
      while (offset < k && phi(offset + 0.5) < u) ++offset;
      table_[i] = static_cast<std::int8_t>(std::clamp(offset, -127, 127));
    }
  }

  int operator()(std::uint16_t bits) const { return table_[bits]; }

 private:
  static constexpr std::size_t kSize = 1u << 16;
  std::vector<std::int8_t> table_;
};

inline WorldPoint recorded_position(const SceneConfig& scene, long frame_index, double t) {
  WorldPoint pos = trajectory_position(scene.trajectory, std::min(t, scene.trajectory.duration()));
  if (scene.jitter_sigma_cm > 0.0) {
    auto rng = frame_rng(scene.seed, frame_index, 2);
    std::normal_distribution<double> jitter(0.0, scene.jitter_sigma_cm);
    pos.x += jitter(rng);
    pos.y += jitter(rng);
    pos.z += jitter(rng);
  }
  return pos;
}

}  // namespace detail

inline void SceneConfig::validate() const {
  camera.validate();
  if (!(fps > 0.0)) throw Error(ErrorKind::InvalidConfig, "fps must be positive");
  if (noise_sigma < 0.0) throw Error(ErrorKind::InvalidConfig, "noise sigma must be >= 0");
  if (dark_level < 0 || dark_level > 255) {
    throw Error(ErrorKind::InvalidConfig, "dark level must be an 8-bit value");
  }
  if (trajectory.waypoints.empty()) {
    throw Error(ErrorKind::InvalidConfig, "trajectory needs at least one waypoint");
  }
  if (!(trajectory.speed_cm_s > 0.0 && trajectory.speed_cm_s <= 22.0)) {
    throw Error(ErrorKind::InvalidConfig, "trajectory speed must lie in (0, 22] cm/s");
  }
  if (trajectory.dwell_s < 0.0) throw Error(ErrorKind::InvalidConfig, "dwell must be >= 0");
  for (std::size_t i = 0; i < lamps.size(); ++i) {
    const auto& lamp = lamps[i];
    if (!(lamp.radius_cm > 0.0)) throw Error(ErrorKind::InvalidConfig, "lamp radius must be > 0");
    if (lamp.stripe_period_rows && *lamp.stripe_period_rows < 4) {
      throw Error(ErrorKind::InvalidConfig, "stripe period must be at least 4 rows");
    }
    if (!(lamp.on_intensity > lamp.off_intensity) || lamp.on_intensity > 255 ||
        lamp.off_intensity < 0) {
      throw Error(ErrorKind::InvalidConfig, "lamp needs 0 <= off < on <= 255");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (lamps[j].id == lamp.id) throw Error(ErrorKind::InvalidConfig, "duplicate lamp id");
    }
  }
  for (const auto& ev : occlusions) {
    if (!find_lamp(ev.lamp_id)) {
      throw Error(ErrorKind::InvalidConfig, "occlusion refers to an unknown lamp");
    }
    if (!(ev.target_fraction >= 0.2 && ev.target_fraction <= 0.95)) {
      throw Error(ErrorKind::InvalidConfig, "occlusion fraction must lie in [0.2, 0.95]");
    }
    if (ev.last_frame < ev.first_frame) {
      throw Error(ErrorKind::InvalidConfig, "occlusion frame range is reversed");
    }
  }
  // Discs must never overlap in the image.
  const long n = frame_count();
  for (long k = 0; k < n; ++k) {
    const WorldPoint cam = trajectory_position(trajectory, std::min(frame_time(k), trajectory.duration()));
    std::vector<std::optional<LampProjection>> proj;
    for (const auto& lamp : lamps) proj.push_back(project_lamp(lamp, cam, camera));
    for (std::size_t i = 0; i < lamps.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (!proj[i] || !proj[j]) continue;
        const double d = std::hypot(proj[i]->centroid.u - proj[j]->centroid.u,
                                    proj[i]->centroid.v - proj[j]->centroid.v);
        if (d <= proj[i]->radius_px + proj[j]->radius_px + 2.0) {
          throw Error(ErrorKind::InvalidConfig, "lamp discs overlap in the image");
        }
      }
    }
  }
}

namespace detail {

// Geometry is evaluated at `t`; `frame_index` selects occlusion events and
// seeds the per-frame noise.
inline std::pair<Frame, GroundTruth> render(const SceneConfig& scene, long frame_index, double t) {
  const auto& intr = scene.camera;
  Frame frame(intr.width, intr.height, static_cast<std::uint8_t>(scene.dark_level));
  frame.frame_index = frame_index;
  frame.timestamp = t;

  GroundTruth truth;
  truth.frame_index = frame_index;
  truth.timestamp = frame.timestamp;
  const WorldPoint camera =
      trajectory_position(scene.trajectory, std::min(frame.timestamp, scene.trajectory.duration()));
  truth.terminal_position = recorded_position(scene, frame_index, t);

  for (const auto& lamp : scene.lamps) {
    LampTruth lt;
    lt.id = lamp.id;
    const auto proj = project_lamp(lamp, camera, intr);
    if (!proj) {
      lt.in_view = false;
      lt.visible_area_fraction = 0.0;
      truth.lamps.push_back(lt);
      continue;
    }
    lt.in_view = true;
    lt.centroid = proj->centroid;
    lt.radius_px = proj->radius_px;

    const auto disc = rasterize_disc(proj->centroid, proj->radius_px);
    std::optional<OccluderRect> occluder;
    for (const auto& ev : scene.occlusions) {
      if (ev.lamp_id == lamp.id && ev.active(frame_index)) {
        occluder = grow_occluder(disc, ev.target_fraction, ev.side);
      }
    }

    // Rolling shutter: each row samples the lamp's on/off state at its readout
    // time, a square wave in row space whose phase drifts with time.
    const double period = lamp.stripe_period_rows ? *lamp.stripe_period_rows : 0.0;
    const double phase = period > 0.0 ? std::fmod(frame.timestamp * scene.rows_per_second, period) : 0.0;

    long total = 0;
    long visible = 0;
    for (std::size_t i = 0; i < disc.spans.size(); ++i) {
      const int row = disc.first_row + static_cast<int>(i);
      auto [a, b] = disc.spans[i];
      int level = lamp.on_intensity;
      if (period > 0.0) {
        const auto half_index = static_cast<long>(std::floor((row + phase) / (0.5 * period)));
        level = (half_index % 2 == 0) ? lamp.on_intensity : lamp.off_intensity;
      }
      for (int col = a; col <= b; ++col) {
        ++total;
        const bool masked = occluder && occluder->covers(col, row);
        if (!masked) ++visible;
        if (!frame.contains(col, row)) continue;
        frame.at(col, row) = static_cast<std::uint8_t>(masked ? scene.dark_level : level);
      }
    }
    lt.visible_area_fraction = total > 0 ? static_cast<double>(visible) / total : 1.0;
    truth.lamps.push_back(lt);
  }

  if (scene.noise_sigma > 0.0) {
    const RoundedGaussianTable noise(scene.noise_sigma);
    auto rng = frame_rng(scene.seed, frame_index, 1);
    std::uint64_t bits = 0;
    int left = 0;
    for (auto& px : frame.pixels) {
      if (left == 0) {
        bits = rng();
        left = 4;
      }
      const int value = static_cast<int>(px) + noise(static_cast<std::uint16_t>(bits));
      bits >>= 16;
      --left;
      px = static_cast<std::uint8_t>(std::clamp(value, 0, 255));
    }
  }
  return {std::move(frame), std::move(truth)};
}

}  // namespace detail

/// Renders the scene at time `t` with its ground truth.
inline std::pair<Frame, GroundTruth> render_frame(const SceneConfig& scene, double t) {
  const double duration = scene.trajectory.duration();
  if (!(t >= 0.0 && t <= duration + 1e-9)) {
    throw Error(ErrorKind::OutOfRange, "time outside the trajectory");
  }
  return detail::render(scene, std::lround(t * scene.fps), std::min(t, duration));
}

/// Renders frame `frame_index` of the sequence, i.e. time frame_index / fps.
inline std::pair<Frame, GroundTruth> render_frame_index(const SceneConfig& scene, long frame_index) {
  if (frame_index < 0 || frame_index >= scene.frame_count()) {
    throw Error(ErrorKind::OutOfRange, "frame index outside the sequence");
  }
  return detail::render(scene, frame_index, scene.frame_time(frame_index));
}

/// Single-consumer stream of rendered frames at 1/fps spacing.
class SequenceGenerator {
 public:
  explicit SequenceGenerator(SceneConfig scene) : scene_(std::move(scene)) {
    scene_.validate();
    count_ = scene_.frame_count();
  }

  std::optional<std::pair<Frame, GroundTruth>> next() {
    if (next_ >= count_) return std::nullopt;
    return render_frame_index(scene_, next_++);
  }

  long frame_count() const { return count_; }
  const SceneConfig& scene() const { return scene_; }

 private:
  SceneConfig scene_;
  long count_ = 0;
  long next_ = 0;
};

}  // namespace vlp
