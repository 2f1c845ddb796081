#include "gyrodeblur/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "gyrodeblur/error.hpp"

namespace gyrodeblur {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    taps[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable 'valid' filtering: output is (h - 10) x (w - 10).
std::vector<double> filter_valid(const std::vector<double>& in, int w, int h) {
  static const auto taps = gaussian_taps();
  const int ow = w - kWindow + 1, oh = h - kWindow + 1;
  std::vector<double> rows(std::size_t(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += taps[k] * in[std::size_t(y) * w + x + k];
      rows[std::size_t(y) * ow + x] = s;
    }
  std::vector<double> out(std::size_t(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += taps[k] * rows[std::size_t(y + k) * ow + x];
      out[std::size_t(y) * ow + x] = s;
    }
  return out;
}

void check_same(const ImageBuf& a, const ImageBuf& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::DimensionMismatch, "images differ in size or channel count");
}

}  // namespace

double mse(const ImageBuf& a, const ImageBuf& b) {
  check_same(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = double(a.data[i]) - double(b.data[i]);
    sum += d * d;
  }
  return a.data.empty() ? 0.0 : sum / static_cast<double>(a.data.size());
}

double psnr(const ImageBuf& a, const ImageBuf& b) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / m);
}

double ssim(const ImageBuf& a, const ImageBuf& b) {
  check_same(a, b);
  if (a.width < kWindow || a.height < kWindow) throw Error(ErrorCode::TooSmall, "SSIM needs at least 11x11 pixels");
  const ImageBuf la = to_luma(a), lb = to_luma(b);
  const int w = a.width, h = a.height;
  const std::size_t n = la.plane_size();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = la.data[i];
    y[i] = lb.data[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mu_x = filter_valid(x, w, h), mu_y = filter_valid(y, w, h);
  const auto e_xx = filter_valid(xx, w, h), e_yy = filter_valid(yy, w, h), e_xy = filter_valid(xy, w, h);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double var_x = e_xx[i] - mu_x[i] * mu_x[i];
    const double var_y = e_yy[i] - mu_y[i] * mu_y[i];
    const double cov = e_xy[i] - mu_x[i] * mu_y[i];
    const double num = (2.0 * mu_x[i] * mu_y[i] + kC1) * (2.0 * cov + kC2);
    const double den = (mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + kC1) * (var_x + var_y + kC2);
    total += num / den;
  }
  return total / static_cast<double>(mu_x.size());
}

}  // namespace gyrodeblur
