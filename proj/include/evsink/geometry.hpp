#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "evsink/core.hpp"
#include "evsink/errors.hpp"

namespace evsink {

// Rigid transform: rotation kept orthonormal with det +1, translation in meters.
struct AffineTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static AffineTransform identity() { return {}; }

  [[nodiscard]] AffineTransform inverse() const {
    AffineTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(rotation.transpose() * translation);
    return inv;
  }

  [[nodiscard]] Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  [[nodiscard]] bool orthonormal(double tol = 1e-9) const {
    const Eigen::Matrix3d err = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
    return err.cwiseAbs().maxCoeff() <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
  }
};

// Nearest rotation matrix in the Frobenius sense.
inline Eigen::Matrix3d orthonormalized(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

// Composition a∘b: applying the result equals applying b, then a.
inline AffineTransform compose(const AffineTransform& a, const AffineTransform& b) {
  AffineTransform out;
  out.rotation = orthonormalized(a.rotation * b.rotation);
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

inline AffineTransform rotation_about_z(double angle_rad) {
  AffineTransform t;
  t.rotation = Eigen::AngleAxisd(angle_rad, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  return t;
}

// Pinhole projection of a camera-frame point to sub-pixel image coordinates.
inline std::pair<double, double> project(const Eigen::Vector3d& point_m, const CameraModel& cam) {
  if (point_m.z() <= 0.0) {
    throw BehindCameraError("point has non-positive depth z=" + std::to_string(point_m.z()));
  }
  const double inv_z = 1.0 / point_m.z();
  const double u = cam.fx * point_m.x() * inv_z + cam.skew * point_m.y() * inv_z + cam.u0;
  const double v = cam.fy * point_m.y() * inv_z + cam.v0;
  return {u, v};
}

// Constant-velocity sweep command through the first and last hole positions.
// The rotational components stay zero: the sweep is a pure translation.
inline Twist plan_sweep_velocity(const Eigen::Vector3d& p_first, const Eigen::Vector3d& p_last,
                                 double speed_mps) {
  const Eigen::Vector3d span = p_last - p_first;
  const double norm = span.norm();
  if (norm < 1e-12) {
    throw DegenerateSpanError("first and last hole positions coincide");
  }
  const Eigen::Vector3d dir = span / norm;
  Twist t;
  t.vx = speed_mps * dir.x();
  t.vy = speed_mps * dir.y();
  t.vz = speed_mps * dir.z();
  return t;
}

}  // namespace evsink
