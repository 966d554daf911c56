#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <vector>

#include "vlp/frame.hpp"
#include "vlp/presets.hpp"
#include "vlp/scene.hpp"

using namespace vlp;

namespace {

SceneConfig single_lamp_scene(std::optional<int> period = 16) {
  SceneConfig s;
  s.lamps = {presets::lamp(1, {100, 45, 190}, period)};
  s.trajectory.waypoints = {{100, 45, 40}, {110, 45, 40}};
  s.trajectory.speed_cm_s = 10.0;
  s.noise_sigma = 0.0;
  return s;
}

// Mean of the lamp pixels (>= threshold) in each row of a window.
std::vector<double> lit_row_profile(const Frame& f, PixelPoint c, double r) {
  std::vector<double> rows;
  for (int v = static_cast<int>(c.v - r) + 1; v < static_cast<int>(c.v + r); ++v) {
    double sum = 0;
    int n = 0;
    for (int u = static_cast<int>(c.u - r); u <= static_cast<int>(c.u + r); ++u) {
      if (f.contains(u, v) && f.at(u, v) > 100) {
        sum += f.at(u, v);
        ++n;
      }
    }
    if (n > 0) rows.push_back(sum / n);
  }
  return rows;
}

}  // namespace

TEST(ProjectLamp, OnAxisLampHitsPrincipalPoint) {
  const CameraIntrinsics c;
  const auto lamp = presets::lamp(1, {100, 45, 190}, 16);
  const auto p = project_lamp(lamp, {100, 45, 40}, c);
  ASSERT_TRUE(p);
  EXPECT_DOUBLE_EQ(p->centroid.u, c.principal_point.u);
  EXPECT_DOUBLE_EQ(p->centroid.v, c.principal_point.v);
  EXPECT_NEAR(p->radius_px, 0.004 * 0.05 / (1.5 * 3.2e-6), 1e-9);
}

TEST(ProjectLamp, HalvingHeightDoublesRadius) {
  const CameraIntrinsics c;
  const auto lamp = presets::lamp(1, {100, 45, 190}, 16);
  const auto far = project_lamp(lamp, {100, 45, 90}, c);
  const auto near = project_lamp(lamp, {100, 45, 140}, c);
  EXPECT_NEAR(near->radius_px, 2.0 * far->radius_px, 1e-9);
}

TEST(ProjectLamp, LampBelowCameraIsInvalid) {
  const auto lamp = presets::lamp(1, {100, 45, 30}, 16);
  try {
    project_lamp(lamp, {100, 45, 40}, CameraIntrinsics{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidGeometry);
  }
}

TEST(ProjectLamp, FarLampIsNotVisible) {
  const auto lamp = presets::lamp(1, {1000, 45, 190}, 16);
  EXPECT_FALSE(project_lamp(lamp, {100, 45, 40}, CameraIntrinsics{}));
}

TEST(ProjectLamp, OffsetDirectionFollowsPinholeInversion) {
  const CameraIntrinsics c;
  const auto lamp = presets::lamp(1, {110, 45, 190}, 16);
  const auto p = project_lamp(lamp, {100, 45, 40}, c);
  EXPECT_NEAR(p->centroid.u, c.principal_point.u - 0.004 * 10.0 / 150.0 / 3.2e-6, 1e-9);
  EXPECT_DOUBLE_EQ(p->centroid.v, c.principal_point.v);
}

TEST(Trajectory, PositionsAlongPolyline) {
  Trajectory t;
  t.waypoints = {{0, 0, 40}, {80, 0, 40}};
  t.speed_cm_s = 10.0;
  EXPECT_DOUBLE_EQ(trajectory_position(t, 0.0).x, 0.0);
  EXPECT_DOUBLE_EQ(trajectory_position(t, 8.0).x, 80.0);
  EXPECT_DOUBLE_EQ(trajectory_position(t, 4.0).x, 40.0);
  try {
    trajectory_position(t, 8.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
  }
  EXPECT_THROW(trajectory_position(t, -0.1), Error);
}

TEST(Trajectory, CornerAndDwell) {
  Trajectory t;
  t.waypoints = {{0, 0, 40}, {30, 0, 40}, {30, 40, 40}};
  t.speed_cm_s = 10.0;
  t.dwell_s = 1.0;
  EXPECT_DOUBLE_EQ(t.duration(), 8.0);
  const auto p = trajectory_position(t, 5.0);
  EXPECT_DOUBLE_EQ(p.x, 30.0);
  EXPECT_DOUBLE_EQ(p.y, 20.0);
  EXPECT_DOUBLE_EQ(trajectory_position(t, 7.5).y, 40.0);
}

TEST(RenderFrame, EmptySceneIsUniform) {
  SceneConfig s = single_lamp_scene();
  s.lamps.clear();
  const auto [frame, truth] = render_frame(s, 0.3);
  for (auto px : frame.pixels) ASSERT_EQ(px, s.dark_level);
  EXPECT_TRUE(truth.lamps.empty());
}

TEST(RenderFrame, OutOfRangeTime) {
  const SceneConfig s = single_lamp_scene();
  EXPECT_THROW(render_frame(s, 5.0), Error);
  EXPECT_THROW(render_frame(s, -1.0), Error);
}

TEST(RenderFrame, StripeProfileIsPeriodic) {
  for (int period : {12, 16, 24, 32}) {
    const SceneConfig s = single_lamp_scene(period);
    const auto [frame, truth] = render_frame(s, 0.2);
    const auto& lt = truth.lamps.at(0);
    const auto prof = lit_row_profile(frame, lt.centroid, lt.radius_px);
    ASSERT_GT(prof.size(), static_cast<std::size_t>(2 * period));
    for (std::size_t i = 0; i + period < prof.size(); ++i) ASSERT_EQ(prof[i], prof[i + period]);

    // Autocorrelation, computed here, peaks at the stripe period.
    const double m = std::accumulate(prof.begin(), prof.end(), 0.0) / prof.size();
    int best = 0;
    double best_r = -1e300;
    for (int k = period / 2 + 1; k <= period + period / 2; ++k) {
      double acc = 0;
      for (std::size_t i = 0; i + k < prof.size(); ++i) acc += (prof[i] - m) * (prof[i + k] - m);
      acc /= static_cast<double>(prof.size() - k);
      if (acc > best_r) {
        best_r = acc;
        best = k;
      }
    }
    EXPECT_EQ(best, period);
  }
}

TEST(RenderFrame, StripePhaseDrifts) {
  const SceneConfig s = single_lamp_scene(16);
  const auto a = render_frame_index(s, 0).first;
  const auto b = render_frame_index(s, 1).first;
  // Same geometry up to a sub-pixel shift; the stripe pattern must differ.
  EXPECT_NE(a.pixels, b.pixels);
}

TEST(RenderFrame, UnmodulatedLampIsFlat) {
  const SceneConfig s = single_lamp_scene(std::nullopt);
  const auto [frame, truth] = render_frame(s, 0.0);
  const auto& lt = truth.lamps.at(0);
  for (double v : lit_row_profile(frame, lt.centroid, lt.radius_px)) EXPECT_EQ(v, 240.0);
}

TEST(RenderFrame, IntensityCentroidMatchesTruth) {
  SceneConfig s = single_lamp_scene(24);
  for (long k = 0; k < s.frame_count(); k += 5) {
    const auto [frame, truth] = render_frame_index(s, k);
    double w = 0, su = 0, sv = 0;
    for (int v = 0; v < frame.height; ++v) {
      for (int u = 0; u < frame.width; ++u) {
        const double x = frame.at(u, v);
        if (x <= s.dark_level) continue;
        w += x;
        su += x * u;
        sv += x * v;
      }
    }
    EXPECT_LT(std::hypot(su / w - truth.lamps[0].centroid.u, sv / w - truth.lamps[0].centroid.v), 0.5);
  }
}

TEST(RenderFrame, OcclusionFractionIsAchievedAndMeasured) {
  for (auto side : {OcclusionSide::Left, OcclusionSide::Right, OcclusionSide::Top, OcclusionSide::Bottom}) {
    for (double target : {0.2, 0.5, 0.7, 0.95}) {
      SceneConfig s = single_lamp_scene(16);
      s.occlusions = {{1, 0, 3, target, side}};
      const auto [frame, truth] = render_frame_index(s, 2);
      const auto& lt = truth.lamps.at(0);
      const double visible = lt.visible_area_fraction;
      EXPECT_NEAR(1.0 - visible, target, 0.02);

      // Count disc pixels that were left lit, using the disc test directly.
      long total = 0, lit = 0;
      for (int v = 0; v < frame.height; ++v) {
        for (int u = 0; u < frame.width; ++u) {
          if (std::hypot(u - lt.centroid.u, v - lt.centroid.v) > lt.radius_px) continue;
          ++total;
          if (frame.at(u, v) != s.dark_level) ++lit;
        }
      }
      EXPECT_NEAR(static_cast<double>(lit) / total, visible, 1e-3);
      // Ground truth keeps the unoccluded centroid.
      const auto clear = render_frame_index(single_lamp_scene(16), 2).second;
      EXPECT_DOUBLE_EQ(lt.centroid.u, clear.lamps[0].centroid.u);
    }
  }
}

TEST(RenderFrame, NoOcclusionMeansFullVisibility) {
  SceneConfig s = single_lamp_scene(16);
  s.occlusions = {{1, 10, 12, 0.5, OcclusionSide::Left}};
  EXPECT_DOUBLE_EQ(render_frame_index(s, 9).second.lamps[0].visible_area_fraction, 1.0);
  EXPECT_DOUBLE_EQ(render_frame_index(s, 13).second.lamps[0].visible_area_fraction, 1.0);
  EXPECT_LT(render_frame_index(s, 11).second.lamps[0].visible_area_fraction, 0.6);
}

TEST(RenderFrame, NoiseStatistics) {
  SceneConfig s = single_lamp_scene();
  s.lamps.clear();
  s.dark_level = 100;
  s.noise_sigma = 2.0;
  const auto [frame, truth] = render_frame(s, 0.0);
  double sum = 0, sq = 0;
  for (auto px : frame.pixels) {
    sum += px;
    sq += static_cast<double>(px) * px;
  }
  const double n = static_cast<double>(frame.pixels.size());
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_NEAR(mean, 100.0, 0.01);
  // Rounding adds 1/12 to the variance of a continuous Gaussian.
  EXPECT_NEAR(var, 4.0 + 1.0 / 12.0, 0.05);
}

TEST(RenderFrame, NoiseIsClamped) {
  SceneConfig s = single_lamp_scene();
  s.lamps.clear();
  s.dark_level = 0;
  s.noise_sigma = 5.0;
  const auto frame = render_frame(s, 0.0).first;
  long zeros = 0;
  for (auto px : frame.pixels) zeros += px == 0;
  EXPECT_GT(zeros, static_cast<long>(frame.pixels.size() / 3));
}

TEST(Sequence, FrameCountAtFps) {
  SceneConfig s = single_lamp_scene();
  s.trajectory.waypoints = {{100, 45, 40}, {120, 45, 40}};
  s.trajectory.speed_cm_s = 10.0;
  EXPECT_EQ(s.frame_count(), 92);
  SequenceGenerator gen(s);
  long n = 0;
  double last_t = -1;
  while (auto item = gen.next()) {
    EXPECT_EQ(item->first.frame_index, n);
    EXPECT_GT(item->first.timestamp, last_t);
    last_t = item->first.timestamp;
    ++n;
  }
  EXPECT_EQ(n, 92);
}

TEST(Sequence, SameSeedSameFrames) {
  SceneConfig s = presets::reference_scene();
  s.noise_sigma = 2.0;
  const auto a = render_frame_index(s, 7).first;
  const auto b = render_frame_index(s, 7).first;
  EXPECT_EQ(a.pixels, b.pixels);
  s.seed = 99;
  EXPECT_NE(render_frame_index(s, 7).first.pixels, a.pixels);
}

TEST(Sequence, StraightLineTrackIsCollinear) {
  const SceneConfig s = presets::reference_scene();
  std::vector<PixelPoint> track;
  for (long k = 0; k < s.frame_count(); k += 3) {
    const auto [frame, truth] = render_frame_index(s, k);
    track.push_back(truth.find(presets::kLed1)->centroid);
  }
  const auto& a = track.front();
  const auto& b = track.back();
  const double len = std::hypot(b.u - a.u, b.v - a.v);
  for (const auto& p : track) {
    const double cross = ((b.u - a.u) * (p.v - a.v) - (b.v - a.v) * (p.u - a.u)) / len;
    EXPECT_LT(std::abs(cross), 1e-9);
  }
}

TEST(Sequence, JitterMovesRecordedPositionOnly) {
  SceneConfig s = presets::reference_scene();
  const auto clean = render_frame_index(s, 5);
  s.jitter_sigma_cm = 1.0;
  const auto jittered = render_frame_index(s, 5);
  EXPECT_EQ(clean.first.pixels, jittered.first.pixels);
  EXPECT_NE(clean.second.terminal_position.x, jittered.second.terminal_position.x);
  EXPECT_EQ(clean.second.lamps[0].centroid.u, jittered.second.lamps[0].centroid.u);
}

TEST(SceneValidation, RejectsBadScenes) {
  SceneConfig s = single_lamp_scene();
  s.trajectory.speed_cm_s = 25.0;
  EXPECT_THROW(s.validate(), Error);

  s = single_lamp_scene();
  s.occlusions = {{1, 0, 2, 0.1, OcclusionSide::Left}};
  EXPECT_THROW(s.validate(), Error);

  s = single_lamp_scene();
  s.lamps[0].off_intensity = 240;
  EXPECT_THROW(s.validate(), Error);

  s = single_lamp_scene();
  s.lamps[0].stripe_period_rows = 3;
  EXPECT_THROW(s.validate(), Error);

  s = single_lamp_scene();
  s.lamps.push_back(presets::lamp(2, {104, 45, 190}, 24));  // discs overlap
  EXPECT_THROW(s.validate(), Error);

  EXPECT_NO_THROW(presets::reference_scene().validate());
}

TEST(Pgm, RoundTripAndErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "vlp_test_pgm";
  std::filesystem::create_directories(dir);
  Frame f(5, 3);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) f.pixels[i] = static_cast<std::uint8_t>(i * 17);
  write_pgm(dir / frame_file_name(4), f);
  EXPECT_EQ(frame_file_name(4), "frame_000004.pgm");
  const Frame g = read_pgm(dir / "frame_000004.pgm");
  EXPECT_EQ(g.width, 5);
  EXPECT_EQ(g.height, 3);
  EXPECT_EQ(g.pixels, f.pixels);

  {
    std::ofstream bad(dir / "bad.pgm", std::ios::binary);
    bad << "P5\n5 3\n255\nabc";
  }
  try {
    read_pgm(dir / "bad.pgm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
    EXPECT_NE(std::string(e.what()).find("bad.pgm"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}
