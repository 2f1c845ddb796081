#pragma once

// Per-pixel blur vectors from camera rotation during the exposure.
//
// Pixel (col, row) has image coordinates (col + 0.5, row + 0.5). Row `y`
// starts exposing at t_f + t_r * y / rows and stops t_e later. The blur
// vector at a pixel is the displacement of its projection between exposure
// start and end, folded so that u >= 0.

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gyrodeblur/imu_io.hpp"
#include "gyrodeblur/rotation.hpp"

namespace gyrodeblur {

/// Projective map; the stored scale is the one produced by the constructing
/// formula (so K R K^-1 keeps H K == K R). Use normalized() for m(2,2) == 1.
struct Homography {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

  /// Throws SingularResult if |det| < 1e-12 or an entry is not finite.
  static Homography checked(const Eigen::Matrix3d& raw);
  Homography normalized() const;
  Eigen::Vector2d apply(const Eigen::Vector2d& pixel) const;
};

struct PlaneParams {
  Eigen::Vector3d normal{0.0, 0.0, 1.0};  // unit scene normal
  double depth = 1.0;                     // metres, > 0
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  void validate() const;
};

/// U/V planes in pixels, row-major, height x width. Values are kept in f64
/// in memory; the BLF file stores f32.
struct BlurField {
  int width = 0;
  int height = 0;
  std::vector<double> u;
  std::vector<double> v;

  BlurField() = default;
  BlurField(int w, int h) : width(w), height(h), u(std::size_t(w) * h, 0.0), v(std::size_t(w) * h, 0.0) {}

  static BlurField uniform(int w, int h, double du, double dv);

  std::size_t index(int x, int y) const { return std::size_t(y) * width + x; }
  double magnitude(int x, int y) const;
  double max_magnitude() const;
};

/// K [R - t n^T / d] K^-1.
Homography homography_full(const Intrinsics& k, const RotationMatrix& r, const PlaneParams& plane);
/// K R K^-1.
Homography homography_rotational(const Intrinsics& k, const RotationMatrix& r);

/// Exposure window [t1, t2] of row y. Throws RowOutOfRange.
std::pair<double, double> row_exposure(int y, const FrameMeta& meta);

/// x' = K R2 R1^T K^-1 x, dehomogenized. R1, R2 are camera orientations
/// (reference-to-camera) at exposure start and end. Throws PointAtInfinity.
Eigen::Vector2d map_point(const Intrinsics& k, const RotationMatrix& r1, const RotationMatrix& r2,
                          const Eigen::Vector3d& x);

/// Folds (u, v) ~ (-u, -v) onto u > 0; u == 0 maps to v >= 0.
std::pair<double, double> canonicalize(double u, double v);

/// Reference-to-camera orientation for an integrated body-to-reference
/// quaternion, i.e. the transpose of its direction cosine matrix.
RotationMatrix camera_orientation(const Quaternion& body_to_ref);

/// R(t2) R(t1)^T for every row, from one forward sweep over the exposure
/// windows. Gyro rates are remapped with k.imu_to_cam first.
std::vector<RotationMatrix> row_relative_rotations(const GyroTrack& track, const FrameMeta& meta,
                                                   const Intrinsics& k, double step = kDefaultStep);

/// Field from per-row relative rotations (one per row).
BlurField blur_field_from_rotations(const Intrinsics& k, const std::vector<RotationMatrix>& row_rotations,
                                    int cols);

BlurField compute_blur_field(const GyroTrack& track, const FrameMeta& meta, const Intrinsics& k,
                             double step = kDefaultStep);

}  // namespace gyrodeblur
