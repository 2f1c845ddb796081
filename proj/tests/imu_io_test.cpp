#include <gtest/gtest.h>

#include <cmath>

#include "gyrodeblur/error.hpp"
#include "gyrodeblur/imu_io.hpp"
#include "gyrodeblur/rng.hpp"
#include "test_support.hpp"

namespace gyrodeblur {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::IoError;
}

TEST(ParseGyroCsv, ConvertsNanosecondsToSeconds) {
  const GyroTrack track = parse_gyro_csv("0,0,0,0\n1000000000,0,0,1");
  ASSERT_EQ(track.size(), 2u);
  EXPECT_EQ(track.samples()[0].t, 0.0);
  EXPECT_EQ(track.samples()[1].t, 1.0);
  EXPECT_EQ(track.samples()[1].omega, Eigen::Vector3d(0, 0, 1));
}

TEST(ParseGyroCsv, SkipsCommentsAndDropsAccelerometerColumns) {
  const GyroTrack track = parse_gyro_csv("# comment\n0,0.1,0.2,0.3,9.8,0,0\n5000000,1,2,3,9.8,0.1,0.2\n");
  ASSERT_EQ(track.size(), 2u);
  EXPECT_EQ(track.samples()[0].omega, Eigen::Vector3d(0.1, 0.2, 0.3));
  EXPECT_DOUBLE_EQ(track.samples()[1].t, 0.005);
}

TEST(ParseGyroCsv, AcceptsCrLfAndBlankLines) {
  const GyroTrack track = parse_gyro_csv("\r\n0, 1, 2, 3\r\n\r\n10,4,5,6\r\n");
  ASSERT_EQ(track.size(), 2u);
  EXPECT_EQ(track.samples()[1].omega, Eigen::Vector3d(4, 5, 6));
}

TEST(ParseGyroCsv, ErrorCases) {
  EXPECT_EQ(code_of([] { parse_gyro_csv("5,0,0,0\n3,0,0,0"); }), ErrorCode::NonMonotonicTimestamps);
  EXPECT_EQ(code_of([] { parse_gyro_csv("5,0,0,0\n5,0,0,0"); }), ErrorCode::NonMonotonicTimestamps);
  EXPECT_EQ(code_of([] { parse_gyro_csv(""); }), ErrorCode::EmptyTrack);
  EXPECT_EQ(code_of([] { parse_gyro_csv("# only a comment\n"); }), ErrorCode::EmptyTrack);
  EXPECT_EQ(code_of([] { parse_gyro_csv("0,1,2"); }), ErrorCode::MalformedLine);
  EXPECT_EQ(code_of([] { parse_gyro_csv("0,1,2,3,4"); }), ErrorCode::MalformedLine);
  EXPECT_EQ(code_of([] { parse_gyro_csv("0,1,x,3"); }), ErrorCode::MalformedLine);
  EXPECT_EQ(code_of([] { parse_gyro_csv("1.5,1,2,3"); }), ErrorCode::MalformedLine);
  EXPECT_EQ(code_of([] { parse_gyro_csv("0,nan,2,3"); }), ErrorCode::MalformedLine);
  EXPECT_EQ(code_of([] { parse_gyro_csv("0,1,2,3,a,b,c"); }), ErrorCode::MalformedLine);
}

// Any byte soup either parses or raises a library Error.
TEST(ParseGyroCsv, TotalOverGarbageInput) {
  Rng rng(7);
  const std::string alphabet = "0123456789,.-+e#\n \tnaN";
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const int len = static_cast<int>(rng.index(80));
    for (int i = 0; i < len; ++i) text += alphabet[rng.index(alphabet.size())];
    try {
      parse_gyro_csv(text);
    } catch (const Error&) {
    }
  }
}

TEST(ParseGyroCsv, SerializeRoundTripIsBitwise) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    // Large absolute timestamps as found in real logs.
    std::string csv;
    Rng rng(seed);
    std::int64_t ns = 1520530308199447626LL + static_cast<std::int64_t>(rng.index(1000000));
    for (int i = 0; i < 200; ++i) {
      ns += 5000000 + static_cast<std::int64_t>(rng.index(1000));
      csv += std::to_string(ns) + "," + std::to_string(rng.normal()) + "," + std::to_string(rng.normal()) + "," +
             std::to_string(rng.normal()) + "\n";
    }
    const GyroTrack a = parse_gyro_csv(csv);
    const GyroTrack b = parse_gyro_csv(serialize_gyro_csv(a));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a.samples()[i].t, b.samples()[i].t);
      EXPECT_EQ(a.samples()[i].omega, b.samples()[i].omega);
    }
  }
}

TEST(SampleOmega, InterpolatesLinearly) {
  const GyroTrack track({{0.0, {0, 0, 0}}, {1.0, {0, 0, 2}}});
  EXPECT_EQ(track.sample_omega(0.5), Eigen::Vector3d(0, 0, 1));
  EXPECT_EQ(track.sample_omega(0.0), Eigen::Vector3d(0, 0, 0));
  EXPECT_EQ(track.sample_omega(1.0), Eigen::Vector3d(0, 0, 2));
  EXPECT_EQ(code_of([&] { track.sample_omega(-1.0); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([&] { track.sample_omega(1.0 + 1e-12); }), ErrorCode::OutOfRange);
}

TEST(SampleOmega, ExactAtSampleTimesAndContinuous) {
  const GyroTrack track = testing::handheld_track(3, 1.0);
  for (const auto& s : track.samples()) EXPECT_EQ(track.sample_omega(s.t), s.omega);
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double t = rng.uniform(0.01, 0.99);
    const double gap = (track.sample_omega(t) - track.sample_omega(t + 1e-9)).norm();
    EXPECT_LT(gap, 1e-4);
  }
}

TEST(FrameMeta, LoadsFields) {
  const FrameMeta m = load_frame_meta(R"({"t_f":0.0,"t_e":0.03,"t_r":0.02,"rows":480,"cols":270})");
  EXPECT_EQ(m.t_f, 0.0);
  EXPECT_EQ(m.t_e, 0.03);
  EXPECT_EQ(m.t_r, 0.02);
  EXPECT_EQ(m.rows, 480);
  EXPECT_EQ(m.cols, 270);
}

TEST(FrameMeta, Rejections) {
  EXPECT_EQ(code_of([] { load_frame_meta(R"({"t_f":0,"t_e":-1,"t_r":0,"rows":4,"cols":4})"); }),
            ErrorCode::InvalidValue);
  EXPECT_EQ(code_of([] { load_frame_meta(R"({"t_f":0,"t_e":0.03,"t_r":-0.1,"rows":4,"cols":4})"); }),
            ErrorCode::InvalidValue);
  EXPECT_EQ(code_of([] { load_frame_meta(R"({"t_f":0,"t_e":0.03,"t_r":0,"rows":4})"); }), ErrorCode::MissingField);
  EXPECT_EQ(code_of([] { load_frame_meta(R"({"t_f":0,"t_e":0.03,"t_r":0,"rows":4.5,"cols":4})"); }),
            ErrorCode::InvalidValue);
  EXPECT_EQ(code_of([] { load_frame_meta("{not json"); }), ErrorCode::InvalidValue);
  EXPECT_EQ(code_of([] { load_frame_meta("[1,2]"); }), ErrorCode::MissingField);
}

TEST(Intrinsics, LoadsAndBuildsMatrices) {
  const Intrinsics k = load_intrinsics(R"({"fx":500,"fy":500,"cx":135,"cy":240})");
  EXPECT_EQ(k.fx, 500.0);
  EXPECT_EQ(k.cy, 240.0);
  EXPECT_TRUE(k.imu_to_cam.isIdentity(0.0));
  EXPECT_TRUE((k.K() * k.K_inv()).isIdentity(1e-15));
}

TEST(Intrinsics, OptionalExtrinsicRotation) {
  const Intrinsics k = load_intrinsics(R"({"fx":1,"fy":1,"cx":0,"cy":0,"imu_to_cam":[0,-1,0,1,0,0,0,0,1]})");
  EXPECT_EQ(k.imu_to_cam * Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0));
  EXPECT_EQ(code_of([] { load_intrinsics(R"({"fx":1,"fy":1,"cx":0,"cy":0,"imu_to_cam":[2,0,0,0,1,0,0,0,1]})"); }),
            ErrorCode::InvalidValue);
  EXPECT_EQ(code_of([] { load_intrinsics(R"({"fx":0,"fy":1,"cx":0,"cy":0})"); }), ErrorCode::InvalidValue);
  EXPECT_EQ(code_of([] { load_intrinsics(R"({"fx":1,"fy":1,"cx":0})"); }), ErrorCode::MissingField);
}

TEST(Intrinsics, DumpRoundTrip) {
  Intrinsics k = load_intrinsics(R"({"fx":512.5,"fy":511.25,"cx":135.5,"cy":240.5,"imu_to_cam":[0,-1,0,1,0,0,0,0,1]})");
  const Intrinsics back = load_intrinsics(dump_intrinsics(k));
  EXPECT_EQ(back.fx, k.fx);
  EXPECT_EQ(back.imu_to_cam, k.imu_to_cam);
  FrameMeta m{1.25, 0.03, 0.01, 48, 27};
  const FrameMeta mb = load_frame_meta(dump_frame_meta(m));
  EXPECT_EQ(mb.t_f, m.t_f);
  EXPECT_EQ(mb.rows, m.rows);
}

}  // namespace
}  // namespace gyrodeblur
