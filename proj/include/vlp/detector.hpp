#pragma once

// Full-frame lamp acquisition: threshold + 4-connected components, then
// LED-ID classification from the rolling-shutter stripe period.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "vlp/error.hpp"
#include "vlp/frame.hpp"
#include "vlp/geometry.hpp"

namespace vlp {

struct PixelRect {
  int min_u = 0;
  int min_v = 0;
  int max_u = -1;  // inclusive
  int max_v = -1;  // inclusive

  int width() const { return max_u - min_u + 1; }
  int height() const { return max_v - min_v + 1; }
};

struct Blob {
  PixelRect bbox;
  long pixel_count = 0;
  PixelPoint intensity_centroid;
  double mean_intensity = 0.0;
  // Component membership over the bounding box, row-major, 1 = member.
  std::vector<std::uint8_t> mask;

  bool member(int u, int v) const {
    return mask[static_cast<std::size_t>(v - bbox.min_v) * bbox.width() + (u - bbox.min_u)] != 0;
  }
};

struct DetectorParams {
  int threshold = 128;
  long min_blob_pixels = 50;
  // Row-profile variance (levels^2) below which a blob counts as unmodulated.
  double variance_floor = 25.0;
  // Normalized autocorrelation a stripe-period peak must reach.
  double min_peak_correlation = 0.3;
};

struct LampIdTable {
  struct Entry {
    int period_rows = 0;
    int lamp_id = 0;
  };
  std::vector<Entry> entries;
  double tolerance_rows = 2.0;

  void validate() const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].period_rows < 4) {
        throw Error(ErrorKind::InvalidConfig, "LED-ID period must be at least 4 rows");
      }
      for (std::size_t j = 0; j < i; ++j) {
        // Match windows may touch but not overlap.
        const double gap = std::abs(entries[i].period_rows - entries[j].period_rows);
        if (gap < 2.0 * tolerance_rows) {
          throw Error(ErrorKind::InvalidConfig,
                      "LED-ID periods must be separated by at least twice the tolerance");
        }
      }
    }
  }

  std::optional<int> match(double period) const {
    std::optional<int> best;
    double best_gap = tolerance_rows;
    for (const auto& e : entries) {
      const double gap = std::abs(period - e.period_rows);
      if (gap < best_gap || (gap == best_gap && !best)) {
        best_gap = gap;
        best = e.lamp_id;
      }
    }
    return best;
  }
};

/// Pixels >= threshold, grouped into 4-connected components of at least
/// `min_blob_pixels`, largest first.
inline std::vector<Blob> detect_blobs(const Frame& frame, const DetectorParams& params = {}) {
  std::vector<Blob> blobs;
  const int w = frame.width;
  const int h = frame.height;
  std::vector<std::uint8_t> seen(frame.pixels.size(), 0);
  std::vector<int> stack;
  std::vector<int> members;
  const auto thr = static_cast<std::uint8_t>(std::clamp(params.threshold, 1, 255));

  for (int start = 0; start < w * h; ++start) {
    if (seen[start] || frame.pixels[start] < thr) continue;
    members.clear();
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      members.push_back(idx);
      const int u = idx % w;
      const int v = idx / w;
      const auto visit = [&](int n) {
        if (!seen[n] && frame.pixels[n] >= thr) {
          seen[n] = 1;
          stack.push_back(n);
        }
      };
      if (u > 0) visit(idx - 1);
      if (u + 1 < w) visit(idx + 1);
      if (v > 0) visit(idx - w);
      if (v + 1 < h) visit(idx + w);
    }
    if (static_cast<long>(members.size()) < params.min_blob_pixels) continue;

    Blob blob;
    blob.bbox = {w, h, -1, -1};
    double sum = 0.0, su = 0.0, sv = 0.0;
    for (int idx : members) {
      const int u = idx % w;
      const int v = idx / w;
      const double value = frame.pixels[idx];
      sum += value;
      su += value * u;
      sv += value * v;
      blob.bbox.min_u = std::min(blob.bbox.min_u, u);
      blob.bbox.min_v = std::min(blob.bbox.min_v, v);
      blob.bbox.max_u = std::max(blob.bbox.max_u, u);
      blob.bbox.max_v = std::max(blob.bbox.max_v, v);
    }
    blob.pixel_count = static_cast<long>(members.size());
    blob.intensity_centroid = {su / sum, sv / sum};
    blob.mean_intensity = sum / static_cast<double>(members.size());
    blob.mask.assign(static_cast<std::size_t>(blob.bbox.width()) * blob.bbox.height(), 0);
    for (int idx : members) {
      const int u = idx % w - blob.bbox.min_u;
      const int v = idx / w - blob.bbox.min_v;
      blob.mask[static_cast<std::size_t>(v) * blob.bbox.width() + u] = 1;
    }
    blobs.push_back(std::move(blob));
  }
  std::stable_sort(blobs.begin(), blobs.end(),
                   [](const Blob& a, const Blob& b) { return a.pixel_count > b.pixel_count; });
  return blobs;
}

struct LedId {
  enum class Kind { Identified, Unmodulated, Unknown };
  Kind kind = Kind::Unknown;
  int lamp_id = -1;
  double period_rows = 0.0;  // estimated stripe period, 0 when none was found

  bool identified() const { return kind == Kind::Identified; }
};

/// Mean intensity of the blob's member pixels in each bounding-box row.
inline std::vector<double> row_profile(const Frame& frame, const Blob& blob) {
  std::vector<double> profile;
  profile.reserve(static_cast<std::size_t>(blob.bbox.height()));
  double last = 0.0;
  for (int v = blob.bbox.min_v; v <= blob.bbox.max_v; ++v) {
    double sum = 0.0;
    int n = 0;
    for (int u = blob.bbox.min_u; u <= blob.bbox.max_u; ++u) {
      if (blob.member(u, v)) {
        sum += frame.at(u, v);
        ++n;
      }
    }
    if (n > 0) last = sum / n;
    profile.push_back(last);
  }
  return profile;
}

/// Dominant period of a 1-D profile from the first significant local maximum
/// of its normalized autocorrelation, refined to sub-lag precision. Lags are
/// searched up to half the profile length so at least two periods are seen.
inline std::optional<double> dominant_period(const std::vector<double>& profile,
                                             double min_peak_correlation) {
  const int n = static_cast<int>(profile.size());
  if (n < 8) return std::nullopt;
  double mean_value = 0.0;
  for (double x : profile) mean_value += x;
  mean_value /= n;
  std::vector<double> x(profile.size());
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    x[i] = profile[i] - mean_value;
    var += x[i] * x[i];
  }
  var /= n;
  if (var <= 0.0) return std::nullopt;

  const int max_lag = n / 2;
  std::vector<double> r(static_cast<std::size_t>(max_lag + 2), 0.0);
  for (int k = 0; k <= std::min(max_lag + 1, n - 1); ++k) {
    double acc = 0.0;
    for (int i = 0; i + k < n; ++i) acc += x[i] * x[i + k];
    r[k] = acc / (n - k) / var;
  }
  for (int k = 2; k <= max_lag; ++k) {
    if (r[k] < min_peak_correlation) continue;
    if (r[k] < r[k - 1] || r[k] < r[k + 1]) continue;
    const double denom = r[k - 1] - 2.0 * r[k] + r[k + 1];
    double offset = 0.0;
    if (denom < 0.0) offset = std::clamp(0.5 * (r[k - 1] - r[k + 1]) / denom, -0.5, 0.5);
    return k + offset;
  }
  return std::nullopt;
}

inline LedId decode_led_id(const Frame& frame, const Blob& blob, const LampIdTable& table,
                           const DetectorParams& params = {}) {
  LedId out;
  if (blob.bbox.height() < 8) return out;
  const auto profile = row_profile(frame, blob);
  double m = 0.0;
  for (double p : profile) m += p;
  m /= static_cast<double>(profile.size());
  double var = 0.0;
  for (double p : profile) var += (p - m) * (p - m);
  var /= static_cast<double>(profile.size());
  if (var < params.variance_floor) {
    out.kind = LedId::Kind::Unmodulated;
    return out;
  }
  const auto period = dominant_period(profile, params.min_peak_correlation);
  if (!period) return out;
  out.period_rows = *period;
  if (auto id = table.match(*period)) {
    out.kind = LedId::Kind::Identified;
    out.lamp_id = *id;
  }
  return out;
}

struct Acquisition {
  std::map<int, Blob> lamps;
  bool complete = false;
};

/// Finds the wanted lamps in a full frame. Unmodulated sources and
/// unidentified blobs are never returned.
inline Acquisition acquire(const Frame& frame, const LampIdTable& table, const std::set<int>& wanted,
                           const DetectorParams& params = {}) {
  Acquisition result;
  for (auto& blob : detect_blobs(frame, params)) {
    const LedId id = decode_led_id(frame, blob, table, params);
    if (!id.identified() || !wanted.contains(id.lamp_id)) continue;
    // Blobs arrive largest first; keep the first blob per identity.
    result.lamps.try_emplace(id.lamp_id, std::move(blob));
  }
  result.complete = !wanted.empty() && result.lamps.size() == wanted.size();
  return result;
}

}  // namespace vlp
