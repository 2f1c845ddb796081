#include "gyrodeblur/imu_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <Eigen/LU>
#include <json.hpp>

#include "gyrodeblur/error.hpp"

namespace gyrodeblur {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  field = trim(field);
  if (field.empty()) return false;
  // from_chars rejects a leading '+', which some loggers emit.
  if (field.front() == '+') field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool all_finite(const Eigen::Vector3d& v) { return v.allFinite(); }

using nlohmann::json;

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidValue, std::string("malformed JSON: ") + e.what());
  }
}

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw Error(ErrorCode::MissingField, std::string("missing field '") + key + "'");
  }
  return doc.at(key);
}

double require_number(const json& doc, const char* key) {
  const json& v = require(doc, key);
  if (!v.is_number()) throw Error(ErrorCode::InvalidValue, std::string("'") + key + "' is not a number");
  return v.get<double>();
}

int require_int(const json& doc, const char* key) {
  const json& v = require(doc, key);
  if (!v.is_number_integer()) throw Error(ErrorCode::InvalidValue, std::string("'") + key + "' is not an integer");
  const auto n = v.get<std::int64_t>();
  if (n < 1 || n > (1 << 20)) throw Error(ErrorCode::InvalidValue, std::string("'") + key + "' out of range");
  return static_cast<int>(n);
}

}  // namespace

GyroTrack::GyroTrack(std::vector<GyroSample> samples) : samples_(std::move(samples)) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i].t) || !all_finite(samples_[i].omega)) {
      throw Error(ErrorCode::InvalidValue, "non-finite gyro sample at index " + std::to_string(i));
    }
    if (i > 0 && !(samples_[i].t > samples_[i - 1].t)) {
      throw Error(ErrorCode::NonMonotonicTimestamps, "timestamp at index " + std::to_string(i) +
                                                         " does not increase");
    }
  }
}

double GyroTrack::start_time() const {
  if (samples_.empty()) throw Error(ErrorCode::EmptyTrack, "track has no samples");
  return samples_.front().t;
}

double GyroTrack::end_time() const {
  if (samples_.empty()) throw Error(ErrorCode::EmptyTrack, "track has no samples");
  return samples_.back().t;
}

Eigen::Vector3d GyroTrack::sample_omega(double t) const {
  if (samples_.empty()) throw Error(ErrorCode::EmptyTrack, "track has no samples");
  if (!(t >= samples_.front().t && t <= samples_.back().t)) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "t=" << t << " outside [" << samples_.front().t << ", "
        << samples_.back().t << "]";
    throw Error(ErrorCode::OutOfRange, msg.str());
  }
  // First sample with time > t; the bracketing interval is [it-1, it].
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double value, const GyroSample& s) { return value < s.t; });
  const GyroSample& lo = *(it - 1);
  if (lo.t == t || it == samples_.end()) return lo.omega;
  const GyroSample& hi = *it;
  const double w = (t - lo.t) / (hi.t - lo.t);
  return lo.omega + w * (hi.omega - lo.omega);
}

GyroTrack GyroTrack::scaled(double factor) const {
  std::vector<GyroSample> out(samples_);
  for (auto& s : out) s.omega *= factor;
  return GyroTrack(std::move(out));
}

GyroTrack GyroTrack::rotated(const Eigen::Matrix3d& rotation) const {
  std::vector<GyroSample> out(samples_);
  for (auto& s : out) s.omega = rotation * s.omega;
  return GyroTrack(std::move(out));
}

void FrameMeta::validate() const {
  if (!(std::isfinite(t_f))) throw Error(ErrorCode::InvalidValue, "t_f must be finite");
  if (!(t_e > 0.0) || !std::isfinite(t_e)) throw Error(ErrorCode::InvalidValue, "t_e must be > 0");
  if (!(t_r >= 0.0) || !std::isfinite(t_r)) throw Error(ErrorCode::InvalidValue, "t_r must be >= 0");
  if (rows < 1) throw Error(ErrorCode::InvalidValue, "rows must be >= 1");
  if (cols < 1) throw Error(ErrorCode::InvalidValue, "cols must be >= 1");
}

void Intrinsics::validate() const {
  if (!(fx > 0.0) || !std::isfinite(fx)) throw Error(ErrorCode::InvalidValue, "fx must be > 0");
  if (!(fy > 0.0) || !std::isfinite(fy)) throw Error(ErrorCode::InvalidValue, "fy must be > 0");
  if (!std::isfinite(cx) || !std::isfinite(cy)) throw Error(ErrorCode::InvalidValue, "principal point must be finite");
  if (!imu_to_cam.allFinite()) throw Error(ErrorCode::InvalidValue, "imu_to_cam must be finite");
  const Eigen::Matrix3d gram = imu_to_cam * imu_to_cam.transpose();
  if (!gram.isApprox(Eigen::Matrix3d::Identity(), 1e-6) || imu_to_cam.determinant() < 0.0) {
    throw Error(ErrorCode::InvalidValue, "imu_to_cam must be a proper rotation");
  }
}

Eigen::Matrix3d Intrinsics::K() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Eigen::Matrix3d Intrinsics::K_inv() const {
  Eigen::Matrix3d k;
  k << 1.0 / fx, 0.0, -cx / fx, 0.0, 1.0 / fy, -cy / fy, 0.0, 0.0, 1.0;
  return k;
}

GyroTrack parse_gyro_csv(std::string_view text) {
  std::vector<GyroSample> samples;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 4 && fields.size() != 7) {
      throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": expected 4 or 7 columns, got " +
                                                std::to_string(fields.size()));
    }
    std::int64_t ns = 0;
    if (!parse_number(fields[0], ns)) {
      throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": bad timestamp");
    }
    GyroSample s;
    s.t = static_cast<double>(ns) / 1e9;
    for (int k = 0; k < 3; ++k) {
      double v = 0.0;
      if (!parse_number(fields[1 + k], v) || !std::isfinite(v)) {
        throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": bad gyro value");
      }
      s.omega[k] = v;
    }
    for (std::size_t k = 4; k < fields.size(); ++k) {
      double ignored = 0.0;
      if (!parse_number(fields[k], ignored)) {
        throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": bad accelerometer value");
      }
    }
    if (!samples.empty() && !(s.t > samples.back().t)) {
      throw Error(ErrorCode::NonMonotonicTimestamps, "line " + std::to_string(line_no) +
                                                         ": timestamp does not increase");
    }
    samples.push_back(s);
  }
  if (samples.empty()) throw Error(ErrorCode::EmptyTrack, "no gyro samples");
  return GyroTrack(std::move(samples));
}

std::string serialize_gyro_csv(const GyroTrack& track) {
  std::ostringstream out;
  out << "# timestamp_ns,gx,gy,gz\n" << std::setprecision(17);
  for (const auto& s : track.samples()) {
    out << std::llround(s.t * 1e9) << ',' << s.omega.x() << ',' << s.omega.y() << ',' << s.omega.z() << '\n';
  }
  return out.str();
}

FrameMeta load_frame_meta(std::string_view json_text) {
  const json doc = parse_json(json_text);
  FrameMeta meta;
  meta.t_f = require_number(doc, "t_f");
  meta.t_e = require_number(doc, "t_e");
  meta.t_r = require_number(doc, "t_r");
  meta.rows = require_int(doc, "rows");
  meta.cols = require_int(doc, "cols");
  meta.validate();
  return meta;
}

Intrinsics load_intrinsics(std::string_view json_text) {
  const json doc = parse_json(json_text);
  Intrinsics k;
  k.fx = require_number(doc, "fx");
  k.fy = require_number(doc, "fy");
  k.cx = require_number(doc, "cx");
  k.cy = require_number(doc, "cy");
  if (doc.contains("imu_to_cam")) {
    const json& m = doc.at("imu_to_cam");
    if (!m.is_array() || m.size() != 9) {
      throw Error(ErrorCode::InvalidValue, "imu_to_cam must be an array of 9 numbers");
    }
    for (int i = 0; i < 9; ++i) {
      if (!m[i].is_number()) throw Error(ErrorCode::InvalidValue, "imu_to_cam entries must be numbers");
      k.imu_to_cam(i / 3, i % 3) = m[i].get<double>();
    }
  }
  k.validate();
  return k;
}

std::string dump_frame_meta(const FrameMeta& meta) {
  json doc = {{"t_f", meta.t_f}, {"t_e", meta.t_e}, {"t_r", meta.t_r}, {"rows", meta.rows}, {"cols", meta.cols}};
  return doc.dump();
}

std::string dump_intrinsics(const Intrinsics& k) {
  json doc = {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}};
  if (!k.imu_to_cam.isIdentity(0.0)) {
    json m = json::array();
    for (int i = 0; i < 9; ++i) m.push_back(k.imu_to_cam(i / 3, i % 3));
    doc["imu_to_cam"] = m;
  }
  return doc.dump();
}

}  // namespace gyrodeblur
