#include "gyrodeblur/rotation.hpp"

#include <algorithm>
#include <cmath>

#include "gyrodeblur/error.hpp"

namespace gyrodeblur {

namespace {

Quaternion operator+(const Quaternion& a, const Quaternion& b) { return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z}; }
Quaternion operator*(double s, const Quaternion& q) { return {s * q.w, s * q.x, s * q.y, s * q.z}; }

// dq/dt for body rate omega.
Quaternion derivative(const Quaternion& q, const Eigen::Vector3d& omega) {
  return 0.5 * quat_mul(q, Quaternion::pure(omega));
}

// Advances q across [a, b], where omega varies linearly from wa to wb.
Quaternion advance_linear(Quaternion q, double a, double b, const Eigen::Vector3d& wa, const Eigen::Vector3d& wb,
                          double h) {
  const double len = b - a;
  if (!(len > 0.0)) return q;
  const int n = std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
  const double dt = len / n;
  const Eigen::Vector3d slope = (wb - wa) / len;
  for (int i = 0; i < n; ++i) {
    const double s0 = i * dt;
    const Eigen::Vector3d w0 = wa + s0 * slope;
    const Eigen::Vector3d wm = wa + (s0 + 0.5 * dt) * slope;
    const Eigen::Vector3d w1 = (i + 1 == n) ? wb : Eigen::Vector3d(wa + (s0 + dt) * slope);
    const Quaternion k1 = derivative(q, w0);
    const Quaternion k2 = derivative(q + (0.5 * dt) * k1, wm);
    const Quaternion k3 = derivative(q + (0.5 * dt) * k2, wm);
    const Quaternion k4 = derivative(q + dt * k3, w1);
    q = (q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).normalized();
  }
  return q;
}

// Advances q from a to b, splitting at gyro sample times.
Quaternion advance(Quaternion q, const GyroTrack& track, double a, double b, double h) {
  const auto samples = track.samples();
  // First sample strictly after a.
  auto it = std::upper_bound(samples.begin(), samples.end(), a,
                             [](double value, const GyroSample& s) { return value < s.t; });
  double seg_start = a;
  Eigen::Vector3d w_start = track.sample_omega(a);
  while (seg_start < b) {
    const double seg_end = (it != samples.end() && it->t < b) ? it->t : b;
    const Eigen::Vector3d w_end = (seg_end == b) ? track.sample_omega(b) : it->omega;
    q = advance_linear(q, seg_start, seg_end, w_start, w_end, h);
    seg_start = seg_end;
    w_start = w_end;
    if (it != samples.end() && it->t <= seg_start) ++it;
  }
  return q;
}

void check_window(const GyroTrack& track, double t1, double t2, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidStep, "integration step must be > 0");
  if (track.size() < 2) throw Error(ErrorCode::EmptyTrack, "integration needs at least 2 gyro samples");
  if (!(t1 >= track.start_time() && t2 <= track.end_time() && t2 >= t1)) {
    throw Error(ErrorCode::OutOfRange, "integration window outside gyro track span");
  }
}

}  // namespace

Quaternion Quaternion::from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0) return identity();
  const Eigen::Vector3d a = axis / n;
  const double s = std::sin(0.5 * angle);
  return {std::cos(0.5 * angle), s * a.x(), s * a.y(), s * a.z()};
}

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return {
      a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
      a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
      a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
      a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
  };
}

double quat_distance(const Quaternion& a, const Quaternion& b) {
  const Eigen::Vector4d ca = a.coeffs();
  const Eigen::Vector4d cb = b.coeffs();
  return std::min((ca - cb).norm(), (ca + cb).norm());
}

RotationMatrix quat_to_matrix(const Quaternion& q) {
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  RotationMatrix m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return m;
}

Quaternion integrate_rotation(const GyroTrack& track, double t1, double t2, double h) {
  check_window(track, t1, t2, h);
  return advance(Quaternion::identity(), track, t1, t2, h);
}

std::vector<Quaternion> integrate_orientations(const GyroTrack& track, std::span<const double> times, double h) {
  std::vector<Quaternion> out;
  if (times.empty()) return out;
  if (!std::is_sorted(times.begin(), times.end())) {
    throw Error(ErrorCode::InvalidParameter, "query times must be ascending");
  }
  check_window(track, times.front(), times.back(), h);
  out.reserve(times.size());
  Quaternion q = Quaternion::identity();
  double t = times.front();
  for (double next : times) {
    q = advance(q, track, t, next, h);
    t = next;
    out.push_back(q);
  }
  return out;
}

}  // namespace gyrodeblur
