#pragma once

// Quaternion kinematics: dq/dt = 1/2 q (x) omega(t), q(t1) = 1.
//
// Hamilton convention, scalar first. Rates are body-frame and multiply on the
// right, so the integrated quaternion maps body (camera) coordinates into the
// frame the camera had at t1.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "gyrodeblur/imu_io.hpp"

namespace gyrodeblur {

struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quaternion identity() { return {}; }
  static Quaternion pure(const Eigen::Vector3d& v) { return {0.0, v.x(), v.y(), v.z()}; }
  /// Rotation of `angle` radians about `axis` (need not be unit length).
  static Quaternion from_axis_angle(const Eigen::Vector3d& axis, double angle);

  double norm() const;
  Quaternion normalized() const;
  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  Eigen::Vector4d coeffs() const { return {w, x, y, z}; }

  friend bool operator==(const Quaternion&, const Quaternion&) = default;
};

using RotationMatrix = Eigen::Matrix3d;

/// Hamilton product a (x) b.
Quaternion quat_mul(const Quaternion& a, const Quaternion& b);

/// Distance that treats q and -q as the same rotation.
double quat_distance(const Quaternion& a, const Quaternion& b);

/// Direction cosine matrix of a unit quaternion: v' = M v rotates v by q.
RotationMatrix quat_to_matrix(const Quaternion& q);

inline constexpr double kDefaultStep = 1e-4;

/// Solves the kinematic equation from t1 (q = 1) to t2 with classical RK4
/// and renormalization after every step. The window is split at gyro sample
/// times so each RK4 step sees a linear rate. Throws OutOfRange if [t1, t2]
/// leaves the track span, InvalidStep if h <= 0.
Quaternion integrate_rotation(const GyroTrack& track, double t1, double t2, double h = kDefaultStep);

/// Orientation at each of `times` (ascending) relative to the first one,
/// computed in a single forward sweep. Equivalent to
/// integrate_rotation(track, times[0], times[i], h) up to rounding.
std::vector<Quaternion> integrate_orientations(const GyroTrack& track, std::span<const double> times,
                                               double h = kDefaultStep);

}  // namespace gyrodeblur
