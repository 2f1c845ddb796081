#include "gyrodeblur/blurfield.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "gyrodeblur/error.hpp"

namespace gyrodeblur {

Homography Homography::checked(const Eigen::Matrix3d& raw) {
  if (!raw.allFinite() || std::abs(raw.determinant()) < 1e-12) {
    throw Error(ErrorCode::SingularResult, "homography is singular");
  }
  return Homography{raw};
}

Homography Homography::normalized() const {
  if (m(2, 2) == 0.0) return *this;
  return checked(m / m(2, 2));
}

Eigen::Vector2d Homography::apply(const Eigen::Vector2d& pixel) const {
  const Eigen::Vector3d p = m * pixel.homogeneous();
  if (std::abs(p.z()) < 1e-12) throw Error(ErrorCode::PointAtInfinity, "point maps to infinity");
  return p.hnormalized();
}

void PlaneParams::validate() const {
  if (std::abs(normal.norm() - 1.0) > 1e-9) throw Error(ErrorCode::InvalidParameter, "plane normal must be unit length");
  if (!(depth > 0.0) || !std::isfinite(depth)) throw Error(ErrorCode::InvalidParameter, "plane depth must be > 0");
  if (!translation.allFinite()) throw Error(ErrorCode::InvalidParameter, "translation must be finite");
}

BlurField BlurField::uniform(int w, int h, double du, double dv) {
  BlurField f(w, h);
  std::fill(f.u.begin(), f.u.end(), du);
  std::fill(f.v.begin(), f.v.end(), dv);
  return f;
}

double BlurField::magnitude(int x, int y) const {
  const auto i = index(x, y);
  return std::hypot(u[i], v[i]);
}

double BlurField::max_magnitude() const {
  double best = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) best = std::max(best, std::hypot(u[i], v[i]));
  return best;
}

Homography homography_full(const Intrinsics& k, const RotationMatrix& r, const PlaneParams& plane) {
  plane.validate();
  const Eigen::Matrix3d inner = r - plane.translation * plane.normal.transpose() / plane.depth;
  return Homography::checked(k.K() * inner * k.K_inv());
}

Homography homography_rotational(const Intrinsics& k, const RotationMatrix& r) {
  return Homography::checked(k.K() * r * k.K_inv());
}

std::pair<double, double> row_exposure(int y, const FrameMeta& meta) {
  if (y < 0 || y >= meta.rows) {
    throw Error(ErrorCode::RowOutOfRange, "row " + std::to_string(y) + " outside [0, " + std::to_string(meta.rows) + ")");
  }
  const double t1 = meta.t_f + meta.t_r * static_cast<double>(y) / static_cast<double>(meta.rows);
  return {t1, t1 + meta.t_e};
}

Eigen::Vector2d map_point(const Intrinsics& k, const RotationMatrix& r1, const RotationMatrix& r2,
                          const Eigen::Vector3d& x) {
  if (!x.allFinite()) throw Error(ErrorCode::InvalidParameter, "point must be finite");
  const Eigen::Vector3d p = k.K() * (r2 * (r1.transpose() * (k.K_inv() * x)));
  if (std::abs(p.z()) < 1e-12) throw Error(ErrorCode::PointAtInfinity, "point maps to infinity");
  return p.hnormalized();
}

std::pair<double, double> canonicalize(double u, double v) {
  if (u > 0.0) return {u, v};
  if (u < 0.0) return {-u, -v};
  return {0.0, std::abs(v)};
}

RotationMatrix camera_orientation(const Quaternion& body_to_ref) {
  return quat_to_matrix(body_to_ref).transpose();
}

std::vector<RotationMatrix> row_relative_rotations(const GyroTrack& track, const FrameMeta& meta,
                                                   const Intrinsics& k, double step) {
  meta.validate();
  k.validate();
  const GyroTrack cam_track = k.imu_to_cam.isIdentity(0.0) ? track : track.rotated(k.imu_to_cam);

  std::vector<std::pair<double, double>> windows(meta.rows);
  std::vector<double> times;
  times.reserve(2 * std::size_t(meta.rows));
  for (int y = 0; y < meta.rows; ++y) {
    windows[y] = row_exposure(y, meta);
    times.push_back(windows[y].first);
    times.push_back(windows[y].second);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const std::vector<Quaternion> orientations = integrate_orientations(cam_track, times, step);
  auto orientation_at = [&](double t) {
    const auto pos = std::lower_bound(times.begin(), times.end(), t) - times.begin();
    return camera_orientation(orientations[pos]);
  };

  std::vector<RotationMatrix> out(meta.rows);
  for (int y = 0; y < meta.rows; ++y) {
    const RotationMatrix r1 = orientation_at(windows[y].first);
    const RotationMatrix r2 = orientation_at(windows[y].second);
    out[y] = r2 * r1.transpose();
  }
  return out;
}

BlurField blur_field_from_rotations(const Intrinsics& k, const std::vector<RotationMatrix>& row_rotations,
                                    int cols) {
  const int rows = static_cast<int>(row_rotations.size());
  BlurField field(cols, rows);
  for (int y = 0; y < rows; ++y) {
    const Eigen::Matrix3d h = k.K() * row_rotations[y] * k.K_inv();
    const double py = y + 0.5;
    for (int x = 0; x < cols; ++x) {
      const double px = x + 0.5;
      const double hx = h(0, 0) * px + h(0, 1) * py + h(0, 2);
      const double hy = h(1, 0) * px + h(1, 1) * py + h(1, 2);
      const double hw = h(2, 0) * px + h(2, 1) * py + h(2, 2);
      if (std::abs(hw) < 1e-12) throw Error(ErrorCode::PointAtInfinity, "pixel maps to infinity");
      const auto [bu, bv] = canonicalize(hx / hw - px, hy / hw - py);
      const auto i = field.index(x, y);
      field.u[i] = bu;
      field.v[i] = bv;
    }
  }
  return field;
}

BlurField compute_blur_field(const GyroTrack& track, const FrameMeta& meta, const Intrinsics& k, double step) {
  return blur_field_from_rotations(k, row_relative_rotations(track, meta, k, step), meta.cols);
}

}  // namespace gyrodeblur
