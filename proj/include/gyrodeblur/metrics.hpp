#pragma once

// Full-reference quality metrics on [0, 1] images.
//
// PSNR pools squared error over every pixel and channel. SSIM uses the
// standard constants (11x11 Gaussian window, sigma 1.5, K1 = 0.01,
// K2 = 0.03, L = 1) over the valid region, on BT.601 luma for RGB input.

#include "gyrodeblur/image.hpp"

namespace gyrodeblur {

double mse(const ImageBuf& a, const ImageBuf& b);

/// 10 log10(1 / MSE); +infinity when the images are identical.
double psnr(const ImageBuf& a, const ImageBuf& b);

/// Mean local SSIM. Throws DimensionMismatch, TooSmall (side < 11).
double ssim(const ImageBuf& a, const ImageBuf& b);

}  // namespace gyrodeblur
