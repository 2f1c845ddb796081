#pragma once

// Gyroscope logs, frame timing and camera calibration.
//
// Timestamps are f64 seconds. Gyro rates are body-frame rad/s; when the
// calibration carries an `imu_to_cam` rotation the rates are remapped into
// the camera frame before any geometry is evaluated.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace gyrodeblur {

struct GyroSample {
  double t = 0.0;         // seconds
  Eigen::Vector3d omega;  // rad/s
};

/// Time-ordered gyro samples. Immutable once constructed; the constructor
/// enforces finiteness and strictly increasing timestamps.
class GyroTrack {
 public:
  GyroTrack() = default;
  explicit GyroTrack(std::vector<GyroSample> samples);

  std::span<const GyroSample> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double start_time() const;
  double end_time() const;

  /// Linearly interpolated rate. Sample times return the sample exactly.
  /// Throws OutOfRange outside [start_time, end_time].
  Eigen::Vector3d sample_omega(double t) const;

  /// Copy with every rate multiplied by `factor`.
  GyroTrack scaled(double factor) const;
  /// Copy with every rate rotated, omega' = rotation * omega.
  GyroTrack rotated(const Eigen::Matrix3d& rotation) const;

 private:
  std::vector<GyroSample> samples_;
};

struct FrameMeta {
  double t_f = 0.0;  // frame timestamp (first row exposure start), s
  double t_e = 0.0;  // exposure time, s
  double t_r = 0.0;  // readout time, s
  int rows = 0;
  int cols = 0;

  void validate() const;
};

struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  Eigen::Matrix3d imu_to_cam = Eigen::Matrix3d::Identity();

  void validate() const;
  Eigen::Matrix3d K() const;
  Eigen::Matrix3d K_inv() const;
};

/// Parses `timestamp_ns,gx,gy,gz[,ax,ay,az]` lines; `#` lines are comments.
GyroTrack parse_gyro_csv(std::string_view text);
/// Inverse of parse_gyro_csv (timestamps rounded to integer ns).
std::string serialize_gyro_csv(const GyroTrack& track);

FrameMeta load_frame_meta(std::string_view json_text);
Intrinsics load_intrinsics(std::string_view json_text);
std::string dump_frame_meta(const FrameMeta& meta);
std::string dump_intrinsics(const Intrinsics& k);

}  // namespace gyrodeblur
