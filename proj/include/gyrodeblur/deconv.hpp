#pragma once

// Non-blind spatially-variant deblurring with Richardson-Lucy iterations
// over the line-blur operator used for synthesis.

#include <functional>

#include "gyrodeblur/blurfield.hpp"
#include "gyrodeblur/image.hpp"

namespace gyrodeblur {

/// Exact transpose of apply_blur_field for the same field.
ImageBuf adjoint_apply(const ImageBuf& img, const BlurField& field);

struct RichardsonLucyOptions {
  int iters = 50;
  double eps = 1e-6;        // division guard
  double clamp_max = 4.0;   // iterate ceiling; output is clamped to [0, 1]
  /// Called after each iteration with the Poisson data term
  /// sum(Ax - b log Ax), summed over channels and evaluated at the updated
  /// estimate. Costs one extra forward application per iteration.
  std::function<void(int iter, double objective)> on_iteration;
};

/// x <- x * A^T(b / Ax) / A^T 1, starting at x = b, per channel.
/// Throws DimensionMismatch or InvalidIters.
ImageBuf richardson_lucy_sv(const ImageBuf& blurred, const BlurField& field, const RichardsonLucyOptions& options = {});

inline ImageBuf richardson_lucy_sv(const ImageBuf& blurred, const BlurField& field, int iters) {
  RichardsonLucyOptions options;
  options.iters = iters;
  return richardson_lucy_sv(blurred, field, options);
}

}  // namespace gyrodeblur
