#include <gtest/gtest.h>

#include <cmath>

#include "gyrodeblur/deconv.hpp"
#include "gyrodeblur/error.hpp"
#include "gyrodeblur/metrics.hpp"
#include "gyrodeblur/rng.hpp"
#include "gyrodeblur/synth.hpp"
#include "test_support.hpp"

namespace gyrodeblur {
namespace {

double dot(const ImageBuf& a, const ImageBuf& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) s += double(a.data[i]) * b.data[i];
  return s;
}

BlurField random_field(int w, int h, std::uint64_t seed, double max_len) {
  Rng rng(seed);
  BlurField f(w, h);
  // Smooth-ish field: a random affine map of the pixel position.
  const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), c = rng.uniform(-1, 1), d = rng.uniform(-1, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double u = max_len * 0.5 * (a * x / w + b * y / h + 0.5);
      const double v = max_len * 0.5 * (c * x / w + d * y / h);
      const auto [cu, cv] = canonicalize(u, v);
      f.u[f.index(x, y)] = cu;
      f.v[f.index(x, y)] = cv;
    }
  return f;
}

TEST(Adjoint, InnerProductIdentity) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ImageBuf x = testing::random_image(64, 64, 1, 100 + seed);
    const ImageBuf y = testing::random_image(64, 64, 1, 200 + seed);
    const BlurField f = random_field(64, 64, seed, 25.0);
    const double lhs = dot(apply_blur_field(x, f), y);
    const double rhs = dot(x, adjoint_apply(y, f));
    EXPECT_LT(std::abs(lhs - rhs) / std::abs(lhs), 1e-5);
  }
}

TEST(Adjoint, NegatedUniformFieldIsReverseBox) {
  // Away from the borders, the transpose of a (20, 0) line blur is the
  // same blur pointing the other way.
  const ImageBuf img = testing::random_image(80, 8, 1, 5);
  const ImageBuf at = adjoint_apply(img, BlurField::uniform(80, 8, 20.0, 0.0));
  const ImageBuf rev = apply_blur_field(img, BlurField::uniform(80, 8, -20.0, 0.0));
  for (int y = 0; y < 8; ++y)
    for (int x = 21; x < 80 - 21; ++x) EXPECT_NEAR(at.at(0, y, x), rev.at(0, y, x), 1e-6);
}

TEST(Adjoint, ColumnSumsPreserveMass) {
  // Each forward output distributes unit total weight.
  const BlurField f = random_field(40, 30, 9, 15.0);
  const ImageBuf ones(40, 30, 1, 1.0f);
  const ImageBuf at = adjoint_apply(ones, f);
  double total = 0.0;
  for (float v : at.data) total += v;
  EXPECT_NEAR(total, 40.0 * 30.0, 1e-3);
}

TEST(RichardsonLucy, ImprovesUniformBlur) {
  const ImageBuf sharp = testing::dead_leaves(96, 96, 1, 3);
  const BlurField f = BlurField::uniform(96, 96, 20.0, 0.0);
  const ImageBuf blurred = apply_blur_field(sharp, f);
  const ImageBuf restored = richardson_lucy_sv(blurred, f, 50);
  EXPECT_GE(psnr(sharp, restored) - psnr(sharp, blurred), 3.0);
}

TEST(RichardsonLucy, ObjectiveDoesNotIncrease) {
  const ImageBuf sharp = testing::dead_leaves(64, 64, 1, 4);
  const BlurField f = random_field(64, 64, 4, 12.0);
  const ImageBuf blurred = apply_blur_field(sharp, f);
  std::vector<double> objective;
  RichardsonLucyOptions opt;
  opt.iters = 20;
  opt.on_iteration = [&](int, double value) { objective.push_back(value); };
  richardson_lucy_sv(blurred, f, opt);
  ASSERT_EQ(objective.size(), 20u);
  for (std::size_t i = 1; i < objective.size(); ++i) {
    EXPECT_LE(objective[i], objective[i - 1] + 1e-7 * std::abs(objective[i - 1])) << i;
  }
}

TEST(RichardsonLucy, FixedPointsAndRange) {
  const BlurField f = random_field(32, 32, 5, 10.0);
  const ImageBuf flat(32, 32, 3, 0.4f);
  const ImageBuf out = richardson_lucy_sv(flat, f, 10);
  for (float v : out.data) EXPECT_NEAR(v, 0.4f, 1e-6);
  const ImageBuf noisy = add_gaussian_noise(apply_blur_field(testing::random_image(32, 32, 1, 6), f), 20, 1);
  for (float v : richardson_lucy_sv(noisy, f, 30).data) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  // Zero field: every iteration is the identity.
  const ImageBuf img = testing::random_image(16, 16, 1, 7);
  const ImageBuf same = richardson_lucy_sv(img, BlurField(16, 16), 5);
  for (std::size_t i = 0; i < img.data.size(); ++i) EXPECT_NEAR(same.data[i], img.data[i], 1e-6);
}

TEST(RichardsonLucy, Errors) {
  try {
    richardson_lucy_sv(ImageBuf(8, 8, 1), BlurField(8, 9), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  try {
    richardson_lucy_sv(ImageBuf(8, 8, 1), BlurField(8, 8), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidIters);
  }
}

}  // namespace
}  // namespace gyrodeblur
