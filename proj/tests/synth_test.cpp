#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "gyrodeblur/blf.hpp"
#include "gyrodeblur/error.hpp"
#include "gyrodeblur/file_io.hpp"
#include "gyrodeblur/metrics.hpp"
#include "gyrodeblur/rng.hpp"
#include "gyrodeblur/synth.hpp"
#include "test_support.hpp"

namespace gyrodeblur {
namespace {

namespace fs = std::filesystem;

// Horizontal box of `len` + 1 taps at unit spacing, clamp-to-edge: the
// integer-length case of the line operator written as a plain 1-D filter.
ImageBuf box_filter_x(const ImageBuf& img, int len) {
  ImageBuf out(img.width, img.height, img.channels);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        double s = 0.0;
        for (int i = 0; i <= len; ++i) s += img.at(c, y, std::min(x + i, img.width - 1));
        out.at(c, y, x) = static_cast<float>(s / (len + 1));
      }
  return out;
}

TEST(ApplyBlurField, UniformHorizontalMatchesBoxFilter) {
  const ImageBuf img = testing::random_image(96, 40, 3, 1);
  const ImageBuf blurred = apply_blur_field(img, BlurField::uniform(96, 40, 20.0, 0.0));
  const ImageBuf ref = box_filter_x(img, 20);
  double worst = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 40; ++y)
      for (int x = 0; x < 96 - 21; ++x) worst = std::max(worst, double(std::abs(blurred.at(c, y, x) - ref.at(c, y, x))));
  EXPECT_LT(worst, 1e-5);
}

TEST(ApplyBlurField, ZeroFieldIsIdentity) {
  const ImageBuf img = testing::random_image(33, 21, 1, 2);
  const ImageBuf out = apply_blur_field(img, BlurField(33, 21));
  for (std::size_t i = 0; i < img.data.size(); ++i) EXPECT_NEAR(out.data[i], img.data[i], 1e-6);
}

TEST(ApplyBlurField, ConstantImageIsFixedPoint) {
  Rng rng(3);
  BlurField f(40, 30);
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    f.u[i] = rng.uniform(0, 35);
    f.v[i] = rng.uniform(-35, 35);
  }
  for (float level : {0.0f, 0.3f, 0.7183f, 1.0f}) {
    const ImageBuf out = apply_blur_field(ImageBuf(40, 30, 2, level), f);
    for (float v : out.data) ASSERT_EQ(v, level);
  }
}

TEST(ApplyBlurField, VerticalStepBecomesRamp) {
  // Vertical blur of a horizontal step spreads it into a ramp of the blur length.
  ImageBuf img(20, 60, 1);
  for (int y = 30; y < 60; ++y)
    for (int x = 0; x < 20; ++x) img.at(0, y, x) = 1.0f;
  const ImageBuf out = apply_blur_field(img, BlurField::uniform(20, 60, 0.0, 10.0));
  EXPECT_FLOAT_EQ(out.at(0, 10, 5), 0.0f);
  EXPECT_FLOAT_EQ(out.at(0, 40, 5), 1.0f);
  EXPECT_NEAR(out.at(0, 25, 5), 6.0 / 11.0, 1e-6);
}

TEST(ApplyBlurField, ShapeMismatch) {
  try {
    apply_blur_field(ImageBuf(10, 10, 1), BlurField(10, 11));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Noise, MeasuredPsnrMatchesLevel) {
  const ImageBuf img(256, 256, 1, 0.5f);
  for (double db : {20.0, 30.0, 40.0}) {
    const ImageBuf noisy = add_gaussian_noise(img, db, 9);
    EXPECT_NEAR(psnr(img, noisy), db, 0.3);
  }
  EXPECT_EQ(add_gaussian_noise(img, 30, 4).data, add_gaussian_noise(img, 30, 4).data);
  EXPECT_NE(add_gaussian_noise(img, 30, 4).data, add_gaussian_noise(img, 30, 5).data);
  EXPECT_THROW(add_gaussian_noise(img, 0.0, 1), Error);
}

TEST(Noise, SnrReferenceScalesWithSignalPower) {
  const ImageBuf img(256, 256, 1, 0.25f);
  const ImageBuf noisy = add_gaussian_noise(img, 20.0, 10, NoiseReference::Snr);
  // sigma^2 = 0.0625 / 100
  EXPECT_NEAR(mse(img, noisy), 0.0625 / 100.0, 0.0625 / 100.0 * 0.05);
}

TEST(Perturbation, DeterministicPart) {
  const GyroTrack track = testing::constant_track({0.1, 0.2, 0.3}, 0.0, 1.0);
  const FrameMeta meta{0.2, 0.03, 0.01, 10, 10};
  const Perturbation a = apply_perturbation(track, meta, 1e-3, 0.5, ScaleMode::OnePlusK);
  EXPECT_DOUBLE_EQ(a.meta.t_f, 0.201);
  EXPECT_EQ(a.meta.t_e, meta.t_e);
  EXPECT_NEAR((a.track.samples()[3].omega - 1.5 * track.samples()[3].omega).norm(), 0.0, 1e-15);
  const Perturbation b = apply_perturbation(track, meta, 0.0, 0.5, ScaleMode::LiteralK);
  EXPECT_NEAR((b.track.samples()[3].omega - 0.5 * track.samples()[3].omega).norm(), 0.0, 1e-15);
}

TEST(Perturbation, DrawStatistics) {
  const GyroTrack track = testing::constant_track({0, 0, 1}, 0.0, 1.0, 10.0);
  const FrameMeta meta{0.5, 0.03, 0.0, 4, 4};
  double sd = 0, sk = 0, sd2 = 0, sk2 = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    PerturbParams pp;
    pp.seed = derive_seed(77, i);
    const Perturbation p = perturb_track(track, meta, pp);
    sd += p.t_d;
    sd2 += p.t_d * p.t_d;
    sk += p.k;
    sk2 += p.k * p.k;
  }
  EXPECT_NEAR(sd / n, 0.0, 4 * 1e-5 / std::sqrt(n));
  EXPECT_NEAR(std::sqrt(sd2 / n), 1e-5, 0.05e-5);
  EXPECT_NEAR(sk / n, 0.0, 4 * 0.2 / std::sqrt(n));
  EXPECT_NEAR(std::sqrt(sk2 / n), 0.2, 0.01);
}

GenParams small_params(std::uint64_t seed) {
  GenParams gp;
  gp.seed = seed;
  return gp;
}

TEST(GenerateSample, ZeroRateGivesSharpCopy) {
  const ImageBuf sharp = testing::dead_leaves(48, 64, 3, 1);
  const GyroTrack still = testing::constant_track({0, 0, 0}, 0.0, 1.0);
  const DatasetSample s = generate_sample(sharp, still, default_intrinsics(48, 64), small_params(5), {});
  EXPECT_EQ(s.exact_field.max_magnitude(), 0.0);
  for (std::size_t i = 0; i < sharp.data.size(); ++i) ASSERT_NEAR(s.blurred.data[i], sharp.data[i], 1e-6);
}

TEST(GenerateSample, RecordsTimingWithinRanges) {
  const ImageBuf sharp = testing::dead_leaves(48, 64, 1, 2);
  const GyroTrack track = testing::handheld_track(3, 2.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DatasetSample s = generate_sample(sharp, track, default_intrinsics(48, 64), small_params(seed), {});
    EXPECT_GE(s.record.t_r, 0.0);
    EXPECT_LE(s.record.t_r, 0.03);
    EXPECT_EQ(s.record.t_e, 0.03);
    EXPECT_GE(s.record.t_f, 0.0);
    EXPECT_LE(s.record.t_f + s.record.t_r + s.record.t_e, 2.0);
    EXPECT_LE(s.exact_field.max_magnitude(), 100.0);
    EXPECT_LE(s.record.omega_multiplier_effective, 2.0);
    EXPECT_GT(s.record.omega_multiplier_effective, 0.0);
  }
}

TEST(GenerateSample, DegradationGrowsWithMultiplier) {
  const ImageBuf sharp = testing::dead_leaves(64, 64, 1, 8);
  const GyroTrack track = testing::handheld_track(9, 1.0);
  double previous = std::numeric_limits<double>::infinity();
  for (double m : {0.5, 1.0, 2.0, 4.0}) {
    GenParams gp = small_params(3);
    gp.omega_multiplier = m;
    gp.max_blur_px = 1e6;
    gp.fixed_t_f = 0.4;
    gp.t_r_min = gp.t_r_max = 0.01;
    const double p = psnr(sharp, generate_sample(sharp, track, default_intrinsics(64, 64), gp, {}).blurred);
    EXPECT_LE(p, previous) << m;
    previous = p;
  }
}

TEST(GenerateSample, CapRescalesRates) {
  const ImageBuf sharp = testing::dead_leaves(64, 64, 1, 3);
  const GyroTrack fast = testing::handheld_track(4, 1.0, 40.0);
  GenParams gp = small_params(6);
  gp.max_blur_px = 15.0;
  const DatasetSample s = generate_sample(sharp, fast, default_intrinsics(64, 64), gp, {});
  EXPECT_LE(s.exact_field.max_magnitude(), 15.0);
  EXPECT_GT(s.exact_field.max_magnitude(), 14.0);
  EXPECT_LT(s.record.omega_multiplier_effective, 2.0);
}

TEST(GenerateSample, DeterministicForSeed) {
  const ImageBuf sharp = testing::dead_leaves(40, 32, 3, 4);
  const GyroTrack track = testing::handheld_track(5, 1.0);
  GenParams gp = small_params(11);
  gp.add_noise = true;
  PerturbParams pp;
  pp.seed = 12;
  const DatasetSample a = generate_sample(sharp, track, default_intrinsics(40, 32), gp, pp);
  const DatasetSample b = generate_sample(sharp, track, default_intrinsics(40, 32), gp, pp);
  EXPECT_EQ(a.blurred.data, b.blurred.data);
  EXPECT_EQ(a.noisy_field.u, b.noisy_field.u);
  EXPECT_EQ(a.record.k, b.record.k);
  gp.seed = 13;
  const DatasetSample c = generate_sample(sharp, track, default_intrinsics(40, 32), gp, pp);
  EXPECT_NE(a.blurred.data, c.blurred.data);
}

TEST(GenerateSample, NoisyFieldDiffersFromExact) {
  const ImageBuf sharp = testing::dead_leaves(40, 32, 1, 5);
  const GyroTrack track = testing::handheld_track(6, 1.0);
  PerturbParams pp;
  pp.seed = 3;
  const DatasetSample s = generate_sample(sharp, track, default_intrinsics(40, 32), small_params(1), pp);
  ASSERT_NE(s.record.k, 0.0);
  double diff = 0.0;
  for (std::size_t i = 0; i < s.exact_field.u.size(); ++i) diff += std::abs(s.exact_field.u[i] - s.noisy_field.u[i]);
  EXPECT_GT(diff, 0.0);

  // No perturbation: identical fields.
  pp.sigma_delay = 0.0;
  pp.sigma_scale = 0.0;
  const DatasetSample same = generate_sample(sharp, track, default_intrinsics(40, 32), small_params(1), pp);
  EXPECT_EQ(same.exact_field.u, same.noisy_field.u);
  EXPECT_EQ(same.exact_field.v, same.noisy_field.v);
}

TEST(GenerateSample, FixedStartAndErrors) {
  const ImageBuf sharp = testing::dead_leaves(16, 16, 1, 6);
  const GyroTrack track = testing::handheld_track(7, 0.5);
  GenParams gp = small_params(2);
  gp.fixed_t_f = 0.25;
  EXPECT_EQ(generate_sample(sharp, track, default_intrinsics(16, 16), gp, {}).record.t_f, 0.25);
  gp.fixed_t_f = 0.49;
  try {
    generate_sample(sharp, track, default_intrinsics(16, 16), gp, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TrackTooShort);
  }
  const GyroTrack tiny = testing::constant_track({0, 0, 1}, 0.0, 0.04);
  EXPECT_THROW(generate_sample(sharp, tiny, default_intrinsics(16, 16), small_params(1), {}), Error);
  GenParams bad = small_params(1);
  bad.t_e = 0.0;
  EXPECT_THROW(generate_sample(sharp, track, default_intrinsics(16, 16), bad, {}), Error);
}

void write_inputs(const fs::path& root, int images, int tracks) {
  fs::create_directories(root / "img");
  fs::create_directories(root / "imu");
  for (int i = 0; i < images; ++i) {
    write_png(testing::dead_leaves(56 + 8 * i, 40, 3, 100 + i), root / "img" / ("im" + std::to_string(i) + ".png"), 8);
  }
  for (int i = 0; i < tracks; ++i) {
    write_file(root / "imu" / ("t" + std::to_string(i) + ".csv"),
               serialize_gyro_csv(testing::handheld_track(200 + i, 1.0)));
  }
}

TEST(Dataset, WritesManifestAndFiles) {
  const fs::path root = testing::temp_dir("dataset");
  write_inputs(root, 2, 2);
  DatasetConfig cfg;
  cfg.image_dir = root / "img";
  cfg.imu_dir = root / "imu";
  cfg.out_dir = root / "out";
  cfg.count = 4;
  cfg.master_seed = 42;
  cfg.crop_width = 32;
  cfg.crop_height = 24;
  const auto lines = generate_dataset(cfg);
  ASSERT_EQ(lines.size(), 4u);
  const std::string manifest = read_file(cfg.out_dir / "manifest.jsonl");
  std::istringstream in(manifest);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("index").get<int>(), n);
    for (const char* key : {"sharp", "blurred", "exact_field", "noisy_field"}) {
      ASSERT_TRUE(fs::exists(cfg.out_dir / j.at(key).get<std::string>())) << key;
    }
    for (const char* key : {"seed", "t_f", "t_e", "t_r", "omega_multiplier_effective", "k", "t_d"}) {
      EXPECT_TRUE(j.contains(key)) << key;
    }
    const ImageBuf sharp = read_png(cfg.out_dir / j.at("sharp").get<std::string>());
    const BlurField f = read_blf(cfg.out_dir / j.at("exact_field").get<std::string>());
    EXPECT_EQ(sharp.width, 32);
    EXPECT_EQ(sharp.height, 24);
    EXPECT_EQ(f.width, 32);
    EXPECT_EQ(f.height, 24);
    ++n;
  }
  EXPECT_EQ(n, 4);
}

TEST(Dataset, ReproducibleAndIndependentOfJobs) {
  const fs::path root = testing::temp_dir("dataset_repro");
  write_inputs(root, 2, 2);
  DatasetConfig cfg;
  cfg.image_dir = root / "img";
  cfg.imu_dir = root / "imu";
  cfg.count = 5;
  cfg.master_seed = 7;
  cfg.out_dir = root / "a";
  generate_dataset(cfg);
  cfg.out_dir = root / "b";
  cfg.jobs = 3;
  generate_dataset(cfg);
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    EXPECT_EQ(read_file(entry.path()), read_file(root / "b" / entry.path().filename())) << entry.path();
  }
  cfg.out_dir = root / "c";
  cfg.master_seed = 8;
  generate_dataset(cfg);
  EXPECT_NE(read_file(root / "a" / "blur_000000.png"), read_file(root / "c" / "blur_000000.png"));
}

TEST(Dataset, EdgeCases) {
  const fs::path root = testing::temp_dir("dataset_edge");
  write_inputs(root, 1, 1);
  DatasetConfig cfg;
  cfg.image_dir = root / "img";
  cfg.imu_dir = root / "imu";
  cfg.out_dir = root / "out";
  cfg.count = 0;
  EXPECT_TRUE(generate_dataset(cfg).empty());
  EXPECT_EQ(read_file(cfg.out_dir / "manifest.jsonl"), "");

  cfg.count = 1;
  cfg.image_dir = root / "imu";
  try {
    generate_dataset(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoImagesFound);
  }
  cfg.image_dir = root / "img";
  cfg.imu_dir = root / "img";
  try {
    generate_dataset(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoTracksFound);
  }
  cfg.imu_dir = root / "missing";
  try {
    generate_dataset(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

}  // namespace
}  // namespace gyrodeblur
