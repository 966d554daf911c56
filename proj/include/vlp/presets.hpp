#pragma once

// Reference scene: the 190 x 100 x 190 cm platform with LED1 (100,45,190),
// LED2 (100,145,190), LED3 (0,145,190), an unmodulated fluorescent fixture,
// a 2048 x 1536 camera with 3.2 um pixels at 46 FPS, and a terminal moving at
// camera height 40 cm (H = 150 cm).

#include "vlp/detector.hpp"
#include "vlp/pipeline.hpp"
#include "vlp/scene.hpp"

namespace vlp::presets {

inline constexpr int kLed1 = 1;
inline constexpr int kLed2 = 2;
inline constexpr int kLed3 = 3;
inline constexpr int kFluorescent = 0;

inline LampSpec lamp(int id, WorldPoint at, std::optional<int> period, double radius_cm = 5.0) {
  LampSpec l;
  l.id = id;
  l.position = at;
  l.radius_cm = radius_cm;
  l.stripe_period_rows = period;
  return l;
}

inline SceneConfig reference_scene() {
  SceneConfig scene;
  scene.lamps = {
      lamp(kLed1, {100.0, 45.0, 190.0}, 16),
      lamp(kLed2, {100.0, 145.0, 190.0}, 24),
      lamp(kLed3, {0.0, 145.0, 190.0}, 32),
      lamp(kFluorescent, {40.0, 95.0, 190.0}, std::nullopt, 6.0),
  };
  scene.lamps.back().on_intensity = 235;
  scene.trajectory.waypoints = {{60.0, 80.0, 40.0}, {100.0, 80.0, 40.0}};
  scene.trajectory.speed_cm_s = 15.0;
  return scene;
}

inline LampIdTable reference_id_table() {
  LampIdTable table;
  table.entries = {{12, 4}, {16, kLed1}, {24, kLed2}, {32, kLed3}};
  table.tolerance_rows = 2.0;
  return table;
}

/// Tracking configuration for LED1 + LED2 in `scene`.
inline PipelineConfig pipeline_for(const SceneConfig& scene, int lamp_a = kLed1, int lamp_b = kLed2) {
  PipelineConfig cfg;
  cfg.wanted = {lamp_a, lamp_b};
  cfg.camera = scene.camera;
  cfg.lamp_positions = {scene.find_lamp(lamp_a)->position, scene.find_lamp(lamp_b)->position};
  cfg.id_table = reference_id_table();
  return cfg;
}

}  // namespace vlp::presets
