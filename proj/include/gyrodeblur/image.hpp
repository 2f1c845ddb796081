#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gyrodeblur {

/// Planar float image, channel-major: data[(c * height + y) * width + x].
/// Values are linear intensities on a [0, 1] scale.
struct ImageBuf {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;

  ImageBuf() = default;
  ImageBuf(int w, int h, int c, float fill = 0.0f)
      : width(w), height(h), channels(c), data(std::size_t(w) * h * c, fill) {}

  std::size_t plane_size() const { return std::size_t(width) * height; }
  std::span<float> plane(int c) { return {data.data() + c * plane_size(), plane_size()}; }
  std::span<const float> plane(int c) const { return {data.data() + c * plane_size(), plane_size()}; }

  float& at(int c, int y, int x) { return data[(std::size_t(c) * height + y) * width + x]; }
  float at(int c, int y, int x) const { return data[(std::size_t(c) * height + y) * width + x]; }

  bool same_shape(const ImageBuf& other) const {
    return width == other.width && height == other.height && channels == other.channels;
  }
};

/// BT.601 luma for RGB input; single-channel images are returned unchanged.
ImageBuf to_luma(const ImageBuf& img);

/// Sub-rectangle copy. Throws OutOfRange if it does not fit.
ImageBuf crop(const ImageBuf& img, int x0, int y0, int w, int h);

// PNG codec. 8/16-bit gray or RGB input (palette/alpha are expanded or
// stripped); values are taken as linear unless `srgb_decode` is set.
ImageBuf decode_png(std::string_view bytes, bool srgb_decode = false);
ImageBuf read_png(const std::filesystem::path& path, bool srgb_decode = false);

/// Encodes gray or RGB at 8 or 16 bits, clamping to [0, 1].
std::string encode_png(const ImageBuf& img, int bit_depth = 16, bool srgb_encode = false);
void write_png(const ImageBuf& img, const std::filesystem::path& path, int bit_depth = 16, bool srgb_encode = false);

}  // namespace gyrodeblur
