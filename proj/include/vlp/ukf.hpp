#pragma once

// Unscented Kalman filter over two lamp centroids that share one image-plane
// velocity: x = [u1, v1, u2, v2, du, dv], velocities in px/frame.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "vlp/error.hpp"
#include "vlp/geometry.hpp"

namespace vlp {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;
template <int N>
using Mat = Eigen::Matrix<double, N, N>;

constexpr int kJointDim = 6;

struct UtParams {
  double alpha = 0.5;
  double beta = 2.0;
  double kappa = 0.0;

  double lambda(int n) const { return alpha * alpha * (n + kappa) - n; }
};

template <int N>
struct SigmaPoints {
  Eigen::Matrix<double, N, 2 * N + 1> points;
  Eigen::Matrix<double, 2 * N + 1, 1> mean_weights;
  Eigen::Matrix<double, 2 * N + 1, 1> cov_weights;
};

namespace detail {

// Lower-triangular L with L * L^T = a for symmetric positive semi-definite a.
// Zero pivots yield zero columns; a negative pivot is a failure.
template <int N>
std::optional<Mat<N>> semidefinite_cholesky(const Mat<N>& a) {
  Mat<N> l = Mat<N>::Zero();
  const double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
  const double tol = 1e-13 * scale;
  for (int j = 0; j < N; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d > tol) {
      l(j, j) = std::sqrt(d);
      for (int i = j + 1; i < N; ++i) {
        double s = a(i, j);
        for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
        l(i, j) = s / l(j, j);
      }
    } else if (d >= -tol) {
      for (int i = j + 1; i < N; ++i) {
        double s = a(i, j);
        for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
        if (std::abs(s) > 1e-9 * scale) return std::nullopt;
      }
    } else {
      return std::nullopt;
    }
  }
  return l;
}

}  // namespace detail

template <int N>
Mat<N> symmetrized(const Mat<N>& p) {
  return 0.5 * (p + p.transpose());
}

/// Scaled unscented transform sampling: 2N+1 points with mean and covariance
/// weights.
template <int N>
SigmaPoints<N> sigma_points(const Vec<N>& mean, const Mat<N>& cov, const UtParams& params = {}) {
  const double lambda = params.lambda(N);
  const double spread = N + lambda;
  if (!(params.alpha > 0.0 && params.alpha <= 1.0) || !(spread > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "unscented transform parameters give non-positive spread");
  }
  const Mat<N> p = symmetrized<N>(cov);
  auto root = detail::semidefinite_cholesky<N>(spread * p);
  if (!root) root = detail::semidefinite_cholesky<N>(spread * (p + 1e-9 * Mat<N>::Identity()));
  if (!root) throw Error(ErrorKind::NumericalDegeneracy, "covariance is not positive semi-definite");

  SigmaPoints<N> sp;
  sp.points.col(0) = mean;
  for (int i = 0; i < N; ++i) {
    sp.points.col(1 + i) = mean + root->col(i);
    sp.points.col(1 + N + i) = mean - root->col(i);
  }
  sp.mean_weights.setConstant(1.0 / (2.0 * spread));
  sp.cov_weights.setConstant(1.0 / (2.0 * spread));
  sp.mean_weights(0) = lambda / spread;
  sp.cov_weights(0) = lambda / spread + (1.0 - params.alpha * params.alpha + params.beta);
  return sp;
}

/// Weighted sample mean and covariance of a set of (transformed) sigma points.
template <int N, int M>
std::pair<Vec<M>, Mat<M>> sigma_moments(const Eigen::Matrix<double, M, 2 * N + 1>& points,
                                        const SigmaPoints<N>& sp) {
  const Vec<M> mean = points * sp.mean_weights;
  Mat<M> cov = Mat<M>::Zero();
  for (int i = 0; i < 2 * N + 1; ++i) {
    const Vec<M> d = points.col(i) - mean;
    cov += sp.cov_weights(i) * d * d.transpose();
  }
  return {mean, cov};
}

struct JointState {
  Vec<kJointDim> mean = Vec<kJointDim>::Zero();
  Mat<kJointDim> cov = Mat<kJointDim>::Zero();

  PixelPoint lamp(int k) const { return {mean(2 * k), mean(2 * k + 1)}; }
  PixelPoint velocity() const { return {mean(4), mean(5)}; }
};

struct NoiseModel {
  Mat<kJointDim> process = (Vec<kJointDim>() << 0.25, 0.25, 0.25, 0.25, 1.0, 1.0).finished().asDiagonal();
  Eigen::Matrix2d measurement = Eigen::Matrix2d::Identity();
  double scale_min = 1.0;
  double scale_max = 100.0;
  double reliability_floor = 0.05;
  double prior_position = 4.0;
  double prior_velocity = 25.0;

  void validate() const {
    if (!(scale_min >= 1.0 && scale_min < scale_max)) {
      throw Error(ErrorKind::InvalidConfig, "noise scale bounds need 1 <= s_min < s_max");
    }
    if (!(reliability_floor > 0.0 && reliability_floor < 1.0)) {
      throw Error(ErrorKind::InvalidConfig, "reliability floor must lie in (0, 1)");
    }
    const auto psd = [](const auto& m) {
      Eigen::SelfAdjointEigenSolver<std::decay_t<decltype(m)>> es(0.5 * (m + m.transpose()));
      return es.eigenvalues().minCoeff() >= -1e-12;
    };
    if (!psd(process) || !psd(measurement)) {
      throw Error(ErrorKind::InvalidConfig, "noise covariances must be positive semi-definite");
    }
    if (!(prior_position > 0.0 && prior_velocity > 0.0)) {
      throw Error(ErrorKind::InvalidConfig, "state priors must be positive");
    }
  }
};

inline Vec<kJointDim> constant_velocity(const Vec<kJointDim>& x) {
  Vec<kJointDim> out = x;
  out(0) += x(4);
  out(1) += x(5);
  out(2) += x(4);
  out(3) += x(5);
  return out;
}

inline JointState initialize(PixelPoint lamp1, PixelPoint lamp2, const NoiseModel& noise = {}) {
  JointState s;
  s.mean << lamp1.u, lamp1.v, lamp2.u, lamp2.v, 0.0, 0.0;
  s.cov.setZero();
  s.cov.diagonal() << noise.prior_position, noise.prior_position, noise.prior_position,
      noise.prior_position, noise.prior_velocity, noise.prior_velocity;
  return s;
}

/// Re-seeds one lamp after re-acquisition; the shared velocity is kept.
inline void reset_lamp(JointState& s, int k, PixelPoint centroid, const NoiseModel& noise = {}) {
  for (int r = 2 * k; r < 2 * k + 2; ++r) {
    s.cov.row(r).setZero();
    s.cov.col(r).setZero();
    s.cov(r, r) = noise.prior_position;
  }
  s.mean(2 * k) = centroid.u;
  s.mean(2 * k + 1) = centroid.v;
}

inline JointState predict(const JointState& s, const Mat<kJointDim>& process_noise,
                          const UtParams& ut = {}) {
  const auto sp = sigma_points<kJointDim>(s.mean, s.cov, ut);
  Eigen::Matrix<double, kJointDim, 2 * kJointDim + 1> moved;
  for (int i = 0; i < 2 * kJointDim + 1; ++i) moved.col(i) = constant_velocity(sp.points.col(i));
  auto [mean, cov] = sigma_moments<kJointDim, kJointDim>(moved, sp);
  JointState out;
  out.mean = mean;
  out.cov = symmetrized<kJointDim>(cov + process_noise);
  return out;
}

/// Measurement-noise multiplier from the Bhattacharyya similarity between the
/// tracked window and the target model: high similarity, small scale.
inline double reliability_scale(double rho, const NoiseModel& model = {}) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw Error(ErrorKind::InvalidSimilarity, "similarity must lie in [0, 1]");
  }
  const double ratio = (1.0 - rho) / std::max(rho, model.reliability_floor);
  return std::clamp(ratio * ratio, model.scale_min, model.scale_max);
}

struct LampMeasurement {
  std::optional<PixelPoint> centroid;
  double scale = 1.0;
};

struct UpdateResult {
  JointState state;
  bool updated = false;
};

/// UT measurement update with h(x) selecting the measured lamps' centroids and
/// R = blockdiag(scale_k * R0).
inline UpdateResult update(const JointState& predicted, const std::array<LampMeasurement, 2>& z,
                           const Eigen::Matrix2d& base_noise, const UtParams& ut = {}) {
  std::vector<int> rows;
  for (int k = 0; k < 2; ++k) {
    if (z[k].centroid) {
      rows.push_back(2 * k);
      rows.push_back(2 * k + 1);
    }
  }
  if (rows.empty()) return {predicted, false};
  const int m = static_cast<int>(rows.size());
  constexpr int kPoints = 2 * kJointDim + 1;

  const auto sp = sigma_points<kJointDim>(predicted.mean, predicted.cov, ut);
  Eigen::MatrixXd zs(m, kPoints);
  for (int i = 0; i < kPoints; ++i) {
    for (int r = 0; r < m; ++r) zs(r, i) = sp.points(rows[r], i);
  }
  const Eigen::VectorXd z_mean = zs * sp.mean_weights;
  Eigen::MatrixXd pzz = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd pxz = Eigen::MatrixXd::Zero(kJointDim, m);
  for (int i = 0; i < kPoints; ++i) {
    const Eigen::VectorXd dz = zs.col(i) - z_mean;
    const Vec<kJointDim> dx = sp.points.col(i) - predicted.mean;
    pzz += sp.cov_weights(i) * dz * dz.transpose();
    pxz += sp.cov_weights(i) * dx * dz.transpose();
  }
  Eigen::VectorXd observed(m);
  int r = 0;
  for (int k = 0; k < 2; ++k) {
    if (!z[k].centroid) continue;
    pzz.block<2, 2>(r, r) += z[k].scale * base_noise;
    observed(r) = z[k].centroid->u;
    observed(r + 1) = z[k].centroid->v;
    r += 2;
  }
  const Eigen::MatrixXd gain = pzz.ldlt().solve(pxz.transpose()).transpose();
  UpdateResult out;
  out.updated = true;
  out.state.mean = predicted.mean + gain * (observed - z_mean);
  out.state.cov = symmetrized<kJointDim>(predicted.cov - gain * pzz * gain.transpose());
  return out;
}

}  // namespace vlp
