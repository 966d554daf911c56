#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "vlp/camshift.hpp"
#include "vlp/presets.hpp"
#include "vlp/scene.hpp"

using namespace vlp;

namespace {

IntensityHistogram hist_of(std::vector<double> w) {
  IntensityHistogram h;
  h.weights = std::move(w);
  return h;
}

IntensityHistogram delta(int bins, int b) {
  std::vector<double> w(bins, 0.0);
  w[b] = 1.0;
  return hist_of(w);
}

IntensityHistogram uniform(int bins) { return hist_of(std::vector<double>(bins, 1.0 / bins)); }

WeightMap field(int w, int h, const std::function<double(int, int)>& f) {
  WeightMap m;
  m.region = {0, 0, w - 1, h - 1};
  m.weights.resize(static_cast<std::size_t>(w) * h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) m.weights[static_cast<std::size_t>(v) * w + u] = f(u, v);
  return m;
}

// Density whose gradient flat-window mean shift climbs: the weights smoothed by
// the product Epanechnikov kernel matching the window extent.
double smoothed_density(const WeightMap& m, double x, double y, double hw, double hh) {
  double d = 0.0;
  for (int v = m.region.min_v; v <= m.region.max_v; ++v) {
    const double dv = (v - y) / hh;
    if (std::abs(dv) >= 1.0) continue;
    for (int u = m.region.min_u; u <= m.region.max_u; ++u) {
      const double du = (u - x) / hw;
      if (std::abs(du) >= 1.0) continue;
      d += m.at(u, v) * (1.0 - du * du) * (1.0 - dv * dv);
    }
  }
  return d;
}

SceneConfig static_lamp_scene() {
  SceneConfig s;
  s.lamps = {presets::lamp(1, {100, 45, 190}, 16)};
  s.trajectory.waypoints = {{88, 52, 40}};
  s.trajectory.dwell_s = 1.0;
  s.noise_sigma = 0.0;
  return s;
}

Blob lamp_blob(const Frame& frame) {
  auto blobs = detect_blobs(frame);
  EXPECT_EQ(blobs.size(), 1u);
  return blobs.at(0);
}

}  // namespace

TEST(Histogram, UniformWindowIsDelta) {
  const Frame f(50, 50, 77);
  const auto h = build_histogram(f, {{25, 25}, 10, 10});
  ASSERT_EQ(h.bins(), 32);
  EXPECT_NEAR(h.weights[77 / 8], 1.0, 1e-12);
  EXPECT_NEAR(std::accumulate(h.weights.begin(), h.weights.end(), 0.0), 1.0, 1e-9);
}

TEST(Histogram, QuantizationInvariance) {
  std::mt19937 rng(5);
  Frame f(60, 40);
  for (auto& p : f.pixels) p = static_cast<std::uint8_t>(8 * (rng() % 31));
  const SearchWindow w{{30.3, 19.7}, 12.5, 9.0};
  const auto base = build_histogram(f, w);
  for (int c = 1; c < 8; ++c) {
    Frame g = f;
    for (auto& p : g.pixels) p = static_cast<std::uint8_t>(p + c);
    const auto h = build_histogram(g, w);
    for (int b = 0; b < 32; ++b) EXPECT_DOUBLE_EQ(h.weights[b], base.weights[b]);
  }
}

TEST(Histogram, RenderedLampTopBinsAreStripeLevels) {
  const auto s = static_lamp_scene();
  const auto [frame, truth] = render_frame_index(s, 0);
  const auto blob = lamp_blob(frame);
  const auto state = init_track(frame, blob);
  const auto& w = state.reference.weights;
  std::vector<int> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return w[a] > w[b]; });
  const int on_bin = state.reference.bin_of(240);
  const int off_bin = state.reference.bin_of(150);
  EXPECT_TRUE((order[0] == on_bin && order[1] == off_bin) || (order[0] == off_bin && order[1] == on_bin));
  for (double x : w) EXPECT_GE(x, 0.0);
}

TEST(Histogram, OutsideFrameThrows) {
  const Frame f(20, 20, 5);
  EXPECT_THROW(build_histogram(f, {{-50, 10}, 5, 5}), Error);
}

TEST(Backproject, DeltaAndUniform) {
  Frame f(30, 30, 0);
  for (int i = 0; i < 30; ++i) f.at(i, i) = 200;
  const auto d = backproject(f, {0, 0, 29, 29}, delta(32, 200 / 8));
  for (int v = 0; v < 30; ++v)
    for (int u = 0; u < 30; ++u) EXPECT_EQ(d.at(u, v), u == v ? 1.0 : 0.0);
  const auto uni = backproject(f, {-5, -5, 40, 12}, uniform(32));
  EXPECT_EQ(uni.region.min_u, 0);
  EXPECT_EQ(uni.region.max_v, 12);
  for (double w : uni.weights) EXPECT_DOUBLE_EQ(w, 1.0 / 32);
}

TEST(Backproject, LampModelSeparatesDiscFromBackground) {
  const auto s = static_lamp_scene();
  const auto [frame, truth] = render_frame_index(s, 3);
  const auto blob = lamp_blob(frame);
  const auto state = init_track(frame, blob);
  const auto& lt = truth.lamps[0];
  const int r = static_cast<int>(lt.radius_px) * 2;
  const PixelRect region{static_cast<int>(lt.centroid.u) - r, static_cast<int>(lt.centroid.v) - r,
                         static_cast<int>(lt.centroid.u) + r, static_cast<int>(lt.centroid.v) + r};
  const auto map = backproject(frame, region, state.reference);
  double in = 0, out = 0;
  long n_in = 0, n_out = 0;
  for (int v = region.min_v; v <= region.max_v; ++v) {
    for (int u = region.min_u; u <= region.max_u; ++u) {
      const double d = std::hypot(u - lt.centroid.u, v - lt.centroid.v);
      if (d < lt.radius_px - 1) {
        in += map.at(u, v);
        ++n_in;
      } else if (d > lt.radius_px + 1) {
        out += map.at(u, v);
        ++n_out;
      }
    }
  }
  EXPECT_GT(in / n_in, 5.0 * (out / n_out));
}

TEST(MeanShift, ConstantWeightsStayPut) {
  const auto m = field(41, 41, [](int, int) { return 1.0; });
  const auto r = mean_shift(m, {20, 20}, 6, 6);
  EXPECT_FALSE(r.lost);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_DOUBLE_EQ(r.mode.u, 20.0);
  EXPECT_DOUBLE_EQ(r.mode.v, 20.0);
}

TEST(MeanShift, SinglePixelIsReached) {
  const auto m = field(60, 60, [](int u, int v) { return (u == 31 && v == 24) ? 0.3 : 0.0; });
  const auto r = mean_shift(m, {27.4, 20.2}, 8, 8);
  EXPECT_FALSE(r.lost);
  EXPECT_DOUBLE_EQ(r.mode.u, 31.0);
  EXPECT_DOUBLE_EQ(r.mode.v, 24.0);
}

TEST(MeanShift, EmptyWindowIsLost) {
  const auto m = field(60, 60, [](int u, int) { return u > 50 ? 1.0 : 0.0; });
  const auto r = mean_shift(m, {10, 10}, 6, 6);
  EXPECT_TRUE(r.lost);
}

TEST(MeanShift, MatchesSmoothedDensityArgmax) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> pos(30.0, 50.0), sig(3.0, 8.0), off(-6.0, 6.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double cu = pos(rng), cv = pos(rng), s = sig(rng);
    const auto m = field(80, 80, [&](int u, int v) {
      return std::exp(-((u - cu) * (u - cu) + (v - cv) * (v - cv)) / (2 * s * s));
    });
    const double h = 10.0;
    const auto r = mean_shift(m, {cu + off(rng), cv + off(rng)}, h, h, 100, 0.01);
    double best = -1, bu = 0, bv = 0;
    for (double y = cv - 3; y <= cv + 3; y += 0.05) {
      for (double x = cu - 3; x <= cu + 3; x += 0.05) {
        const double d = smoothed_density(m, x, y, h, h);
        if (d > best) best = d, bu = x, bv = y;
      }
    }
    EXPECT_LT(std::hypot(r.mode.u - bu, r.mode.v - bv), 0.5) << "trial " << trial;
    const auto again = mean_shift(m, r.mode, h, h, 1, 0.5);
    EXPECT_LT(std::hypot(again.mode.u - r.mode.u, again.mode.v - r.mode.v), 0.5);
  }
}

TEST(AdaptWindow, SquareRootLawAndFloor) {
  const auto zero = adapt_window(0.0, 0.1, 2048, 1536);
  EXPECT_EQ(zero.half_width, 4.0);
  EXPECT_EQ(zero.half_height, 4.0);
  const auto a = adapt_window(100.0, 0.2, 2048, 1536);
  const auto b = adapt_window(400.0, 0.2, 2048, 1536);
  EXPECT_NEAR(b.half_width, 2.0 * a.half_width, 1e-12);
  EXPECT_NEAR(a.half_width, std::sqrt(100.0 / 0.2), 1e-12);
  EXPECT_EQ(a.half_width, a.half_height);
  const auto big = adapt_window(1e9, 0.01, 200, 100);
  EXPECT_EQ(big.half_width, 100.0);
  EXPECT_EQ(big.half_height, 50.0);
}

TEST(AdaptWindow, GrowsWhileApproachingLamp) {
  SceneConfig s;
  s.lamps = {presets::lamp(1, {100, 45, 190}, 24)};
  s.trajectory.waypoints = {{100, 45, 0}, {100, 45, 90}};
  s.trajectory.speed_cm_s = 20.0;
  s.noise_sigma = 0.0;
  auto [first, truth0] = render_frame_index(s, 0);
  TrackState state = init_track(first, lamp_blob(first));
  PixelPoint hint = state.window.center;
  double last = state.window.half_width;
  const double start = last;
  for (long k = 1; k < s.frame_count(); ++k) {
    const auto [frame, truth] = render_frame_index(s, k);
    const auto r = track_step(frame, state, hint);
    ASSERT_FALSE(r.lost);
    EXPECT_GE(r.window.half_width, last - 0.05) << "frame " << k;  // stripe quantization
    last = r.window.half_width;
    hint = r.centroid;
  }
  EXPECT_GT(last, 1.7 * start);
}

TEST(Bhattacharyya, ClosedForms) {
  std::mt19937 rng(3);
  std::vector<double> w(32);
  for (auto& x : w) x = rng() % 100 + 1;
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= sum;
  const auto p = hist_of(w);
  EXPECT_NEAR(bhattacharyya(p, p), 1.0, 1e-9);
  EXPECT_EQ(bhattacharyya(delta(32, 3), delta(32, 9)), 0.0);
  EXPECT_NEAR(bhattacharyya(uniform(32), delta(32, 5)), 1.0 / std::sqrt(32.0), 1e-12);
  EXPECT_DOUBLE_EQ(bhattacharyya(p, uniform(32)), bhattacharyya(uniform(32), p));
  EXPECT_LT(bhattacharyya(p, uniform(32)), 1.0 - 1e-6);
  EXPECT_THROW(bhattacharyya(uniform(32), uniform(16)), Error);
}

TEST(TrackStep, StaticLampFromTrueCentroid) {
  const auto s = static_lamp_scene();
  const auto [f0, t0] = render_frame_index(s, 0);
  TrackState state = init_track(f0, lamp_blob(f0));
  for (long k = 1; k < 10; ++k) {
    const auto [frame, truth] = render_frame_index(s, k);
    const auto r = track_step(frame, state, truth.lamps[0].centroid);
    ASSERT_FALSE(r.lost);
    EXPECT_LE(r.iterations, 2);
    EXPECT_LT(std::hypot(r.centroid.u - truth.lamps[0].centroid.u, r.centroid.v - truth.lamps[0].centroid.v), 0.5);
    EXPECT_GE(r.similarity, 0.0);
    EXPECT_LE(r.similarity, 1.0);
    EXPECT_GE(r.area_factor, 0.0);
  }
}

TEST(TrackStep, RecoversFromOffsetHint) {
  const auto s = static_lamp_scene();
  const auto [f0, t0] = render_frame_index(s, 0);
  const auto blob = lamp_blob(f0);
  for (double angle : {0.0, 1.3, 2.9, 4.4}) {
    TrackState state = init_track(f0, blob);
    const auto [frame, truth] = render_frame_index(s, 5);
    const auto c = truth.lamps[0].centroid;
    const auto r = track_step(frame, state, {c.u + 15 * std::cos(angle), c.v + 15 * std::sin(angle)});
    ASSERT_FALSE(r.lost);
    EXPECT_LT(std::hypot(r.centroid.u - c.u, r.centroid.v - c.v), 1.0) << "angle " << angle;
  }
}

TEST(TrackStep, BlankRegionIsLost) {
  const auto s = static_lamp_scene();
  const auto [f0, t0] = render_frame_index(s, 0);
  TrackState state = init_track(f0, lamp_blob(f0));
  const auto r = track_step(f0, state, {1800, 1300});
  EXPECT_TRUE(r.lost);
}

TEST(TrackStep, NoiselessSequenceStaysWithinOnePixel) {
  auto s = presets::reference_scene();
  s.noise_sigma = 0.0;
  const auto table = presets::reference_id_table();
  const auto [f0, t0] = render_frame_index(s, 0);
  const auto acq = acquire(f0, table, {presets::kLed1});
  ASSERT_TRUE(acq.complete);
  TrackState state = init_track(f0, acq.lamps.at(presets::kLed1));
  PixelPoint hint = state.window.center;
  for (long k = 1; k < s.frame_count(); k += 1) {
    const auto [frame, truth] = render_frame_index(s, k);
    const auto r = track_step(frame, state, hint);
    ASSERT_FALSE(r.lost);
    const auto c = truth.find(presets::kLed1)->centroid;
    ASSERT_LT(std::hypot(r.centroid.u - c.u, r.centroid.v - c.v), 1.0) << "frame " << k;
    hint = r.centroid;
  }
}
