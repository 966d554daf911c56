#include <gtest/gtest.h>

#include <cmath>

#include "vlp/detector.hpp"
#include "vlp/presets.hpp"
#include "vlp/scene.hpp"

using namespace vlp;

namespace {

SceneConfig one_lamp(std::optional<int> period, double sigma = 0.0) {
  SceneConfig s;
  s.lamps = {presets::lamp(1, {100, 45, 190}, period)};
  s.trajectory.waypoints = {{96, 47, 40}, {106, 47, 40}};
  s.trajectory.speed_cm_s = 10.0;
  s.noise_sigma = sigma;
  return s;
}

LampIdTable table_16_24() {
  LampIdTable t;
  t.entries = {{16, 1}, {24, 2}};
  t.tolerance_rows = 2.0;
  return t;
}

Frame scaled(const Frame& f, double k) {
  Frame g = f;
  for (auto& px : g.pixels) px = static_cast<std::uint8_t>(std::clamp(std::lround(px * k), 0L, 255L));
  return g;
}

}  // namespace

TEST(DetectBlobs, DarkFrameHasNoBlobs) {
  const Frame f(640, 480, 10);
  EXPECT_TRUE(detect_blobs(f).empty());
}

TEST(DetectBlobs, SingleLampCentroidMatchesTruth) {
  const auto s = one_lamp(16);
  for (long k : {0L, 9L, 23L}) {
    const auto [frame, truth] = render_frame_index(s, k);
    const auto blobs = detect_blobs(frame);
    ASSERT_EQ(blobs.size(), 1u);
    const auto& c = blobs[0].intensity_centroid;
    EXPECT_LT(std::hypot(c.u - truth.lamps[0].centroid.u, c.v - truth.lamps[0].centroid.v), 0.5);
    EXPECT_GE(blobs[0].pixel_count, 50);
  }
}

TEST(DetectBlobs, CentroidUnderNoise) {
  const auto s = one_lamp(24, 5.0);
  const auto [frame, truth] = render_frame_index(s, 4);
  const auto blobs = detect_blobs(frame);
  ASSERT_EQ(blobs.size(), 1u);
  const auto& c = blobs[0].intensity_centroid;
  EXPECT_LT(std::hypot(c.u - truth.lamps[0].centroid.u, c.v - truth.lamps[0].centroid.v), 1.5);
}

TEST(DetectBlobs, ReferenceSceneObjects) {
  // All four fixtures are in view from the start of the reference track.
  auto s = presets::reference_scene();
  const auto [frame, truth] = render_frame_index(s, 0);
  const auto blobs = detect_blobs(frame);
  long in_view = 0;
  for (const auto& l : truth.lamps) in_view += l.in_view;
  EXPECT_EQ(in_view, 4);
  ASSERT_EQ(blobs.size(), 4u);
  for (std::size_t i = 1; i < blobs.size(); ++i) EXPECT_GE(blobs[i - 1].pixel_count, blobs[i].pixel_count);
  for (const auto& b : blobs) {
    EXPECT_GE(b.bbox.min_u, 0);
    EXPECT_LT(b.bbox.max_u, frame.width);
    long members = 0;
    for (auto m : b.mask) members += m;
    EXPECT_EQ(members, b.pixel_count);
  }
}

TEST(DetectBlobs, SmallComponentsAreDropped) {
  Frame f(100, 100, 0);
  for (int v = 10; v < 16; ++v)
    for (int u = 10; u < 18; ++u) f.at(u, v) = 200;  // 48 px
  for (int v = 40; v < 50; ++v)
    for (int u = 40; u < 50; ++u) f.at(u, v) = 200;  // 100 px
  f.at(18, 10) = 200;                                  // diagonal neighbours are separate
  const auto blobs = detect_blobs(f);
  ASSERT_EQ(blobs.size(), 1u);
  EXPECT_EQ(blobs[0].pixel_count, 100);
  EXPECT_DOUBLE_EQ(blobs[0].intensity_centroid.u, 44.5);
}

TEST(DecodeLedId, ConstantBlobIsUnmodulated) {
  const auto [frame, truth] = render_frame_index(one_lamp(std::nullopt), 0);
  const auto blobs = detect_blobs(frame);
  ASSERT_EQ(blobs.size(), 1u);
  EXPECT_EQ(decode_led_id(frame, blobs[0], table_16_24()).kind, LedId::Kind::Unmodulated);
}

TEST(DecodeLedId, IdentifiesTablePeriods) {
  for (auto [period, id] : {std::pair{16, 1}, std::pair{24, 2}}) {
    const auto s = one_lamp(period);
    for (long k = 0; k < s.frame_count(); k += 4) {
      const auto [frame, truth] = render_frame_index(s, k);
      const auto blobs = detect_blobs(frame);
      ASSERT_EQ(blobs.size(), 1u);
      const LedId led = decode_led_id(frame, blobs[0], table_16_24());
      ASSERT_EQ(led.kind, LedId::Kind::Identified) << "period " << period << " frame " << k;
      EXPECT_EQ(led.lamp_id, id);
      EXPECT_NEAR(led.period_rows, period, 1.0);
    }
  }
}

TEST(DecodeLedId, UnmatchedPeriodIsUnknown) {
  const auto [frame, truth] = render_frame_index(one_lamp(20), 3);
  const auto blobs = detect_blobs(frame);
  ASSERT_EQ(blobs.size(), 1u);
  const LedId led = decode_led_id(frame, blobs[0], table_16_24());
  EXPECT_EQ(led.kind, LedId::Kind::Unknown);
  EXPECT_NEAR(led.period_rows, 20.0, 1.0);
}

TEST(DecodeLedId, ShortBlobIsUnknown) {
  Frame f(100, 100, 0);
  for (int v = 10; v < 17; ++v)
    for (int u = 10; u < 40; ++u) f.at(u, v) = (v % 2) ? 240 : 150;
  const auto blobs = detect_blobs(f);
  ASSERT_EQ(blobs.size(), 1u);
  EXPECT_EQ(decode_led_id(f, blobs[0], table_16_24()).kind, LedId::Kind::Unknown);
}

TEST(DecodeLedId, InvariantToIntensityScaling) {
  const auto [frame, truth] = render_frame_index(one_lamp(24, 2.0), 6);
  const auto blobs = detect_blobs(frame);
  ASSERT_EQ(blobs.size(), 1u);
  const int base = decode_led_id(frame, blobs[0], table_16_24()).lamp_id;
  ASSERT_EQ(base, 2);
  for (double k : {0.5, 0.75, 1.0, 1.25, 1.5}) {
    const Frame g = scaled(frame, k);
    EXPECT_EQ(decode_led_id(g, blobs[0], table_16_24()).lamp_id, base) << "scale " << k;
  }
}

TEST(LampIdTable, SeparationAndMatching) {
  LampIdTable t;
  t.entries = {{12, 4}, {16, 1}, {24, 2}, {32, 3}};
  t.tolerance_rows = 2.0;
  EXPECT_NO_THROW(t.validate());
  EXPECT_EQ(t.match(15.2), 1);
  EXPECT_EQ(t.match(13.9), 4);
  EXPECT_EQ(t.match(14.0), 4);  // boundary tie goes to the first entry
  EXPECT_FALSE(t.match(20.0));
  EXPECT_FALSE(t.match(26.5));
  t.entries = {{16, 1}, {19, 2}};
  EXPECT_THROW(t.validate(), Error);
}

TEST(Acquire, WantedLampsOnlyAndNoInterference) {
  const auto s = presets::reference_scene();
  const auto table = presets::reference_id_table();
  const auto [frame, truth] = render_frame_index(s, 10);
  const auto acq = acquire(frame, table, {presets::kLed1, presets::kLed2});
  EXPECT_TRUE(acq.complete);
  ASSERT_EQ(acq.lamps.size(), 2u);
  EXPECT_TRUE(acq.lamps.contains(presets::kLed1));
  EXPECT_TRUE(acq.lamps.contains(presets::kLed2));
  for (const auto& [id, blob] : acq.lamps) {
    EXPECT_NE(decode_led_id(frame, blob, table).kind, LedId::Kind::Unmodulated);
    const auto* lt = truth.find(id);
    EXPECT_LT(std::hypot(blob.intensity_centroid.u - lt->centroid.u, blob.intensity_centroid.v - lt->centroid.v),
              0.5);
  }
  // The fluorescent fixture is never returned even when asked for.
  const auto tube = acquire(frame, table, {presets::kFluorescent});
  EXPECT_FALSE(tube.complete);
  EXPECT_TRUE(tube.lamps.empty());
}

TEST(Acquire, DarkFrameIsIncomplete) {
  const Frame f(2048, 1536, 10);
  const auto acq = acquire(f, presets::reference_id_table(), {1, 2});
  EXPECT_FALSE(acq.complete);
  EXPECT_TRUE(acq.lamps.empty());
}

TEST(Acquire, MissingWantedLampIsIncomplete) {
  SceneConfig s = one_lamp(24);
  s.lamps[0].id = 2;
  const auto [frame, truth] = render_frame_index(s, 0);
  const auto acq = acquire(frame, table_16_24(), {1});
  EXPECT_FALSE(acq.complete);
  EXPECT_TRUE(acq.lamps.empty());
}
