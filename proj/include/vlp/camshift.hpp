#pragma once

// Cam-shift on grayscale intensity histograms.
//
// The target model is an Epanechnikov-weighted intensity histogram. Tracking
// backprojects it around a start hint, climbs to the mode of the weight map
// with a flat-window mean shift, and re-sizes the window from the zeroth
// moment. The search window is twice the target extent; similarity against
// the model is measured over the target extent.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "vlp/detector.hpp"
#include "vlp/error.hpp"
#include "vlp/frame.hpp"
#include "vlp/geometry.hpp"

namespace vlp {

struct IntensityHistogram {
  std::vector<double> weights;

  int bins() const { return static_cast<int>(weights.size()); }
  int bin_of(std::uint8_t value) const { return static_cast<int>(value) * bins() / 256; }
  double weight_of(std::uint8_t value) const { return weights[static_cast<std::size_t>(bin_of(value))]; }
  double max_weight() const {
    return weights.empty() ? 0.0 : *std::max_element(weights.begin(), weights.end());
  }
};

struct SearchWindow {
  PixelPoint center;
  double half_width = 4.0;
  double half_height = 4.0;

  // Integer pixel span covered by the window, clipped to the frame.
  PixelRect pixel_span(int frame_width, int frame_height) const {
    PixelRect r;
    r.min_u = std::max(0, static_cast<int>(std::ceil(center.u - half_width)));
    r.max_u = std::min(frame_width - 1, static_cast<int>(std::floor(center.u + half_width)));
    r.min_v = std::max(0, static_cast<int>(std::ceil(center.v - half_height)));
    r.max_v = std::min(frame_height - 1, static_cast<int>(std::floor(center.v + half_height)));
    return r;
  }
};

struct CamshiftParams {
  int bins = 32;
  int max_iterations = 20;
  double eps_px = 0.5;
  double search_margin = 1.5;
  double min_half_extent = 4.0;
};

inline IntensityHistogram build_histogram(const Frame& frame, const SearchWindow& window, int bins = 32) {
  if (bins <= 0 || bins > 256) throw Error(ErrorKind::InvalidConfig, "histogram bins must lie in [1, 256]");
  const PixelRect span = window.pixel_span(frame.width, frame.height);
  if (span.min_u > span.max_u || span.min_v > span.max_v) {
    throw Error(ErrorKind::OutOfFrame, "histogram window lies outside the frame");
  }
  IntensityHistogram hist;
  hist.weights.assign(static_cast<std::size_t>(bins), 0.0);
  double total = 0.0;
  for (int v = span.min_v; v <= span.max_v; ++v) {
    const double dv = (v - window.center.v) / window.half_height;
    for (int u = span.min_u; u <= span.max_u; ++u) {
      const double du = (u - window.center.u) / window.half_width;
      const double k = 1.0 - du * du - dv * dv;
      if (k <= 0.0) continue;
      hist.weights[static_cast<std::size_t>(hist.bin_of(frame.at(u, v)))] += k;
      total += k;
    }
  }
  if (!(total > 0.0)) throw Error(ErrorKind::OutOfFrame, "histogram window has no support in the frame");
  for (auto& w : hist.weights) w /= total;
  return hist;
}

/// Per-pixel model likelihood over a rectangular region; zero outside it.
struct WeightMap {
  PixelRect region;
  std::vector<double> weights;

  double at(int u, int v) const {
    if (u < region.min_u || u > region.max_u || v < region.min_v || v > region.max_v) return 0.0;
    return weights[static_cast<std::size_t>(v - region.min_v) * region.width() + (u - region.min_u)];
  }
};

inline WeightMap backproject(const Frame& frame, PixelRect region, const IntensityHistogram& hist) {
  region.min_u = std::max(region.min_u, 0);
  region.min_v = std::max(region.min_v, 0);
  region.max_u = std::min(region.max_u, frame.width - 1);
  region.max_v = std::min(region.max_v, frame.height - 1);
  WeightMap map;
  map.region = region;
  if (region.min_u > region.max_u || region.min_v > region.max_v) {
    map.region = {0, 0, -1, -1};
    return map;
  }
  map.weights.resize(static_cast<std::size_t>(region.width()) * region.height());
  std::size_t i = 0;
  for (int v = region.min_v; v <= region.max_v; ++v) {
    for (int u = region.min_u; u <= region.max_u; ++u) map.weights[i++] = hist.weight_of(frame.at(u, v));
  }
  return map;
}

struct WindowMoments {
  double m00 = 0.0;
  double m10 = 0.0;
  double m01 = 0.0;
};

namespace detail {

// Length of [p - 0.5, p + 0.5] inside [lo, hi].
inline double pixel_overlap(int p, double lo, double hi) {
  return std::clamp(std::min(hi, p + 0.5) - std::max(lo, p - 0.5), 0.0, 1.0);
}

}  // namespace detail

/// Moments of a flat window whose edges cut through pixels; boundary pixels
/// count with the fraction of their area inside the window.
inline WindowMoments window_moments(const WeightMap& map, PixelPoint center, double half_width,
                                    double half_height) {
  WindowMoments m;
  const double lo_u = center.u - half_width, hi_u = center.u + half_width;
  const double lo_v = center.v - half_height, hi_v = center.v + half_height;
  const int min_u = std::max(map.region.min_u, static_cast<int>(std::floor(lo_u + 0.5)));
  const int max_u = std::min(map.region.max_u, static_cast<int>(std::ceil(hi_u - 0.5)));
  const int min_v = std::max(map.region.min_v, static_cast<int>(std::floor(lo_v + 0.5)));
  const int max_v = std::min(map.region.max_v, static_cast<int>(std::ceil(hi_v - 0.5)));
  for (int v = min_v; v <= max_v; ++v) {
    const double cv = detail::pixel_overlap(v, lo_v, hi_v);
    for (int u = min_u; u <= max_u; ++u) {
      const double w = map.at(u, v) * cv * detail::pixel_overlap(u, lo_u, hi_u);
      m.m00 += w;
      m.m10 += w * u;
      m.m01 += w * v;
    }
  }
  return m;
}

struct MeanShiftResult {
  PixelPoint mode;
  int iterations = 0;
  bool lost = false;  // the window held no weight
};

/// Moves a flat window to the weighted centroid of its contents until the
/// shift drops below `eps_px` or `max_iterations` centroids have been taken.
inline MeanShiftResult mean_shift(const WeightMap& weights, PixelPoint start, double half_width,
                                  double half_height, int max_iterations = 20, double eps_px = 0.5) {
  MeanShiftResult result;
  result.mode = start;
  for (int it = 0; it < max_iterations; ++it) {
    const auto m = window_moments(weights, result.mode, half_width, half_height);
    if (!(m.m00 > 0.0)) {
      result.lost = true;
      return result;
    }
    const PixelPoint next{m.m10 / m.m00, m.m01 / m.m00};
    const double shift = std::hypot(next.u - result.mode.u, next.v - result.mode.v);
    result.mode = next;
    result.iterations = it + 1;
    if (shift < eps_px) break;
  }
  return result;
}

struct WindowExtent {
  double half_width = 4.0;
  double half_height = 4.0;
};

/// Classic Cam-shift sizing: square side 2*sqrt(M00 / max weight).
inline WindowExtent adapt_window(double area_factor, double max_weight, int frame_width, int frame_height,
                                 double min_half_extent = 4.0) {
  const double side = (max_weight > 0.0 && area_factor > 0.0) ? 2.0 * std::sqrt(area_factor / max_weight) : 0.0;
  const double half = 0.5 * side;
  return {std::clamp(half, min_half_extent, std::max(min_half_extent, 0.5 * frame_width)),
          std::clamp(half, min_half_extent, std::max(min_half_extent, 0.5 * frame_height))};
}

inline double bhattacharyya(const IntensityHistogram& p, const IntensityHistogram& q) {
  if (p.bins() != q.bins()) {
    throw Error(ErrorKind::IncompatibleHistogram, "histograms have different bin counts");
  }
  double rho = 0.0;
  for (int b = 0; b < p.bins(); ++b) rho += std::sqrt(p.weights[b] * q.weights[b]);
  return std::clamp(rho, 0.0, 1.0);
}

struct TrackState {
  IntensityHistogram reference;
  SearchWindow window;
  double initial_area = 0.0;
};

struct TrackResult {
  PixelPoint centroid;
  SearchWindow window;
  double area_factor = 0.0;
  int iterations = 0;
  double similarity = 0.0;
  bool lost = false;
};

/// Builds the target model from an acquired blob. The model window is the
/// blob's bounding box so that stripe phase does not change the ROI.
inline TrackState init_track(const Frame& frame, const Blob& blob, const CamshiftParams& params = {}) {
  TrackState state;
  SearchWindow model;
  model.center = blob.intensity_centroid;
  model.half_width = std::max(params.min_half_extent, 0.5 * (blob.bbox.width() - 1));
  model.half_height = std::max(params.min_half_extent, 0.5 * (blob.bbox.height() - 1));
  state.reference = build_histogram(frame, model, params.bins);

  const PixelRect box = model.pixel_span(frame.width, frame.height);
  const WeightMap map = backproject(frame, box, state.reference);
  state.initial_area = window_moments(map, model.center, model.half_width, model.half_height).m00;
  const auto extent = adapt_window(state.initial_area, state.reference.max_weight(), frame.width,
                                   frame.height, params.min_half_extent);
  state.window = {model.center, extent.half_width, extent.half_height};
  return state;
}

/// One Cam-shift update starting from `start_hint`. Updates the state's
/// search window on success.
inline TrackResult track_step(const Frame& frame, TrackState& state, PixelPoint start_hint,
                              const CamshiftParams& params = {}) {
  TrackResult result;
  const SearchWindow region_window{start_hint, state.window.half_width * params.search_margin,
                                   state.window.half_height * params.search_margin};
  PixelRect region;
  region.min_u = static_cast<int>(std::ceil(start_hint.u - region_window.half_width));
  region.max_u = static_cast<int>(std::floor(start_hint.u + region_window.half_width));
  region.min_v = static_cast<int>(std::ceil(start_hint.v - region_window.half_height));
  region.max_v = static_cast<int>(std::floor(start_hint.v + region_window.half_height));
  const WeightMap map = backproject(frame, region, state.reference);

  const auto ms = mean_shift(map, start_hint, state.window.half_width, state.window.half_height,
                             params.max_iterations, params.eps_px);
  result.iterations = ms.iterations;
  if (ms.lost) {
    result.lost = true;
    result.centroid = start_hint;
    result.window = state.window;
    return result;
  }
  result.centroid = ms.mode;
  result.area_factor = window_moments(map, ms.mode, state.window.half_width, state.window.half_height).m00;
  const auto extent = adapt_window(result.area_factor, state.reference.max_weight(), frame.width,
                                   frame.height, params.min_half_extent);
  result.window = {ms.mode, extent.half_width, extent.half_height};

  const SearchWindow target{ms.mode, std::max(params.min_half_extent, 0.5 * extent.half_width),
                            std::max(params.min_half_extent, 0.5 * extent.half_height)};
  try {
    result.similarity = bhattacharyya(state.reference, build_histogram(frame, target, params.bins));
  } catch (const Error&) {
    result.similarity = 0.0;  // target window left the frame
  }
  state.window = result.window;
  return result;
}

}  // namespace vlp
