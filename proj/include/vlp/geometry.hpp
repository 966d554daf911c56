#pragma once

// Camera model, double-lamp positioning and the error metrics used to score it.
//
// Units are fixed at the module boundary:
//   world coordinates     centimeters
//   sensor-plane coords   meters, origin at the principal point
//   pixel coordinates     pixels, pixel centers on integer coordinates

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "vlp/error.hpp"

namespace vlp {

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
};

struct ImagePoint {
  double x = 0.0;  // meters
  double y = 0.0;  // meters
};

struct WorldPoint {
  double x = 0.0;  // cm
  double y = 0.0;  // cm
  double z = 0.0;  // cm
};

struct PlanarPoint {
  double x = 0.0;  // cm
  double y = 0.0;  // cm
};

struct CameraIntrinsics {
  double focal_length = 0.004;     // m
  double pixel_pitch_x = 3.2e-6;   // m/px
  double pixel_pitch_y = 3.2e-6;   // m/px
  PixelPoint principal_point{1024.0, 768.0};
  int width = 2048;
  int height = 1536;

  void validate() const {
    if (!(focal_length > 0.0) || !std::isfinite(focal_length)) {
      throw Error(ErrorKind::InvalidConfig, "focal length must be positive");
    }
    if (!(pixel_pitch_x > 0.0) || !(pixel_pitch_y > 0.0)) {
      throw Error(ErrorKind::InvalidConfig, "pixel pitch must be positive");
    }
    if (width <= 0 || height <= 0) {
      throw Error(ErrorKind::InvalidConfig, "resolution must be positive");
    }
    const auto& pp = principal_point;
    if (!(pp.u >= 0.0 && pp.u < width && pp.v >= 0.0 && pp.v < height)) {
      throw Error(ErrorKind::InvalidConfig, "principal point outside the frame");
    }
  }
};

inline ImagePoint pixel_to_image(PixelPoint p, const CameraIntrinsics& intr) {
  return {(p.u - intr.principal_point.u) * intr.pixel_pitch_x,
          (p.v - intr.principal_point.v) * intr.pixel_pitch_y};
}

inline PixelPoint image_to_pixel(ImagePoint p, const CameraIntrinsics& intr) {
  return {p.x / intr.pixel_pitch_x + intr.principal_point.u,
          p.y / intr.pixel_pitch_y + intr.principal_point.v};
}

/// Distance from the sensor to the lamp plane, from the known lamp spacing
/// `world_separation_cm` and its image `image_separation_m`. Returns cm.
inline double estimate_height(double focal_length_m, double world_separation_cm,
                              double image_separation_m) {
  if (!(image_separation_m > 0.0)) {
    throw Error(ErrorKind::DegenerateGeometry, "lamps coincide in the image");
  }
  if (!(world_separation_cm > 0.0) || !(focal_length_m > 0.0)) {
    throw Error(ErrorKind::DegenerateGeometry,
                "lamp separation and focal length must be positive");
  }
  return focal_length_m * world_separation_cm / image_separation_m;
}

inline double image_distance(ImagePoint a, ImagePoint b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Terminal position in the lamp-parallel plane from two imaged lamps.
///
/// The image axes are assumed parallel to, and oriented like, the world axes.
/// A lamp imaged on the +x side of the principal point lies on the -x side of
/// the camera, so the terminal sits at lamp + H * image / f.
inline PlanarPoint locate_terminal(ImagePoint lamp_a_image, ImagePoint lamp_b_image,
                                   const WorldPoint& lamp_a, const WorldPoint& lamp_b,
                                   double height_cm, double focal_length_m) {
  if (!(height_cm > 0.0) || !std::isfinite(height_cm)) {
    throw Error(ErrorKind::InvalidHeight, "height must be positive");
  }
  const bool distinct_world = lamp_a.x != lamp_b.x || lamp_a.y != lamp_b.y;
  const bool same_image = lamp_a_image.x == lamp_b_image.x && lamp_a_image.y == lamp_b_image.y;
  if (distinct_world && same_image) {
    throw Error(ErrorKind::DegenerateGeometry, "distinct lamps imaged at the same point");
  }
  const double mean_i = 0.5 * (lamp_a_image.x + lamp_b_image.x);
  const double mean_j = 0.5 * (lamp_a_image.y + lamp_b_image.y);
  return {0.5 * (lamp_a.x + lamp_b.x) + height_cm * mean_i / focal_length_m,
          0.5 * (lamp_a.y + lamp_b.y) + height_cm * mean_j / focal_length_m};
}

inline double tracking_error(PlanarPoint p, PlanarPoint actual) {
  return std::hypot(p.x - actual.x, p.y - actual.y);
}

inline double positioning_error_3d(const WorldPoint& p, const WorldPoint& actual) {
  const double dx = p.x - actual.x;
  const double dy = p.y - actual.y;
  const double dz = p.z - actual.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Step-function CDF over a finite sample: F(x) = #{s <= x} / N.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::span<const double> samples)
      : sorted_(samples.begin(), samples.end()) {
    if (sorted_.empty()) {
      throw Error(ErrorKind::EmptyInput, "empirical CDF of an empty sample");
    }
    for (double s : sorted_) {
      if (!std::isfinite(s)) {
        throw Error(ErrorKind::EmptyInput, "empirical CDF sample is not finite");
      }
    }
    std::sort(sorted_.begin(), sorted_.end());
  }

  double operator()(double x) const {
    const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
    return static_cast<double>(count) / static_cast<double>(sorted_.size());
  }

  /// Smallest sample x with F(x) >= q.
  double quantile(double q) const {
    if (!(q > 0.0 && q <= 1.0)) {
      throw Error(ErrorKind::InvalidQuantile, "quantile must lie in (0, 1]");
    }
    const double n = static_cast<double>(sorted_.size());
    // k samples at or below the answer; pick the smallest k with k/n >= q.
    auto k = static_cast<std::size_t>(std::ceil(q * n));
    k = std::clamp<std::size_t>(k, 1, sorted_.size());
    while (k > 1 && static_cast<double>(k - 1) / n >= q) --k;
    while (k < sorted_.size() && static_cast<double>(k) / n < q) ++k;
    return sorted_[k - 1];
  }

  /// (x, F(x)) at every distinct sample value, ascending.
  std::vector<std::pair<double, double>> table() const {
    std::vector<std::pair<double, double>> out;
    const double n = static_cast<double>(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
      if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
      out.emplace_back(sorted_[i], static_cast<double>(i + 1) / n);
    }
    return out;
  }

  std::size_t size() const { return sorted_.size(); }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

inline EmpiricalCdf empirical_cdf(std::span<const double> samples) {
  return EmpiricalCdf(samples);
}

inline double percentile(std::span<const double> samples, double q) {
  if (!(q > 0.0 && q <= 1.0)) {
    throw Error(ErrorKind::InvalidQuantile, "quantile must lie in (0, 1]");
  }
  return EmpiricalCdf(samples).quantile(q);
}

inline double mean(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorKind::EmptyInput, "mean of an empty sample");
  double sum = 0.0;
  for (double s : samples) sum += s;
  return sum / static_cast<double>(samples.size());
}

}  // namespace vlp
