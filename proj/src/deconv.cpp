#include "gyrodeblur/deconv.hpp"

#include <algorithm>
#include <cmath>

#include "gyrodeblur/error.hpp"
#include "line_kernel.hpp"

namespace gyrodeblur {

namespace {

void check_shape(const ImageBuf& img, const BlurField& field) {
  if (img.width != field.width || img.height != field.height) {
    throw Error(ErrorCode::DimensionMismatch, "image and blur field sizes differ");
  }
}

double poisson_term(std::span<const double> observed, std::span<const double> predicted, double eps) {
  double sum = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double ax = std::max(predicted[i], eps);
    sum += ax - observed[i] * std::log(ax);
  }
  return sum;
}

}  // namespace

ImageBuf adjoint_apply(const ImageBuf& img, const BlurField& field) {
  check_shape(img, field);
  ImageBuf out(img.width, img.height, img.channels);
  std::vector<double> in_plane(img.plane_size()), out_plane(img.plane_size());
  for (int c = 0; c < img.channels; ++c) {
    std::copy(img.plane(c).begin(), img.plane(c).end(), in_plane.begin());
    detail::adjoint_plane(in_plane, out_plane, field);
    std::transform(out_plane.begin(), out_plane.end(), out.plane(c).begin(),
                   [](double d) { return static_cast<float>(d); });
  }
  return out;
}

ImageBuf richardson_lucy_sv(const ImageBuf& blurred, const BlurField& field, const RichardsonLucyOptions& options) {
  check_shape(blurred, field);
  if (options.iters < 1) throw Error(ErrorCode::InvalidIters, "iteration count must be >= 1");

  const std::size_t n = blurred.plane_size();
  std::vector<double> ones(n, 1.0), norm(n);
  detail::adjoint_plane(ones, norm, field);

  std::vector<std::vector<double>> observed(blurred.channels), estimate(blurred.channels);
  for (int c = 0; c < blurred.channels; ++c) {
    observed[c].assign(blurred.plane(c).begin(), blurred.plane(c).end());
    estimate[c] = observed[c];
  }

  std::vector<double> predicted(n), ratio(n), correction(n);
  for (int it = 1; it <= options.iters; ++it) {
    double objective = 0.0;
    for (int c = 0; c < blurred.channels; ++c) {
      auto& x = estimate[c];
      const auto& b = observed[c];
      detail::forward_plane(x, predicted, field);
      for (std::size_t i = 0; i < n; ++i) ratio[i] = b[i] / std::max(predicted[i], options.eps);
      detail::adjoint_plane(ratio, correction, field);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::clamp(x[i] * correction[i] / std::max(norm[i], options.eps), 0.0, options.clamp_max);
      }
      if (options.on_iteration) {
        detail::forward_plane(x, predicted, field);
        objective += poisson_term(b, predicted, options.eps);
      }
    }
    if (options.on_iteration) options.on_iteration(it, objective);
  }

  ImageBuf out(blurred.width, blurred.height, blurred.channels);
  for (int c = 0; c < blurred.channels; ++c) {
    std::transform(estimate[c].begin(), estimate[c].end(), out.plane(c).begin(),
                   [](double d) { return static_cast<float>(std::clamp(d, 0.0, 1.0)); });
  }
  return out;
}

}  // namespace gyrodeblur
