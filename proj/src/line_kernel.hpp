#pragma once

// Spatially-variant line-blur operator on one f64 plane, and its exact
// transpose. Shared by synthesis and deconvolution.
//
// Output pixel (x, y) averages S = max(2, ceil(|b|) + 1) bilinear samples at
// (x, y) + i/(S-1) * b, i = 0..S-1, where b is the pixel's blur vector.
// Samples outside the image use clamp-to-edge.

#include <algorithm>
#include <cmath>
#include <span>

#include "gyrodeblur/blurfield.hpp"

namespace gyrodeblur::detail {

inline int tap_count(double u, double v) {
  return std::max(2, static_cast<int>(std::ceil(std::hypot(u, v))) + 1);
}

struct Bilinear {
  int x0, x1, y0, y1;
  double fx, fy;
};

inline Bilinear bilinear_at(double xf, double yf, int w, int h) {
  const double fl_x = std::floor(xf);
  const double fl_y = std::floor(yf);
  const int ix = static_cast<int>(fl_x);
  const int iy = static_cast<int>(fl_y);
  return {std::clamp(ix, 0, w - 1), std::clamp(ix + 1, 0, w - 1), std::clamp(iy, 0, h - 1),
          std::clamp(iy + 1, 0, h - 1), xf - fl_x, yf - fl_y};
}

inline void forward_plane(std::span<const double> in, std::span<double> out, const BlurField& field) {
  const int w = field.width, h = field.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto idx = field.index(x, y);
      const double u = field.u[idx], v = field.v[idx];
      const int taps = tap_count(u, v);
      const double denom = taps - 1;
      double sum = 0.0;
      for (int i = 0; i < taps; ++i) {
        const Bilinear b = bilinear_at(x + (i * u) / denom, y + (i * v) / denom, w, h);
        const double a00 = in[std::size_t(b.y0) * w + b.x0], a01 = in[std::size_t(b.y0) * w + b.x1];
        const double a10 = in[std::size_t(b.y1) * w + b.x0], a11 = in[std::size_t(b.y1) * w + b.x1];
        // lerp form keeps constant inputs exact
        const double top = a00 + b.fx * (a01 - a00);
        const double bottom = a10 + b.fx * (a11 - a10);
        sum += top + b.fy * (bottom - top);
      }
      out[idx] = sum / taps;
    }
  }
}

inline void adjoint_plane(std::span<const double> in, std::span<double> out, const BlurField& field) {
  const int w = field.width, h = field.height;
  std::fill(out.begin(), out.end(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto idx = field.index(x, y);
      const double u = field.u[idx], v = field.v[idx];
      const int taps = tap_count(u, v);
      const double denom = taps - 1;
      const double share = in[idx] / taps;
      for (int i = 0; i < taps; ++i) {
        const Bilinear b = bilinear_at(x + (i * u) / denom, y + (i * v) / denom, w, h);
        out[std::size_t(b.y0) * w + b.x0] += share * (1.0 - b.fx) * (1.0 - b.fy);
        out[std::size_t(b.y0) * w + b.x1] += share * b.fx * (1.0 - b.fy);
        out[std::size_t(b.y1) * w + b.x0] += share * (1.0 - b.fx) * b.fy;
        out[std::size_t(b.y1) * w + b.x1] += share * b.fx * b.fy;
      }
    }
  }
}

}  // namespace gyrodeblur::detail
