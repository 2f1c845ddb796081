#include "gyrodeblur/image.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>

#include <png.h>

#include "gyrodeblur/error.hpp"
#include "gyrodeblur/file_io.hpp"

namespace gyrodeblur {

namespace {

float srgb_to_linear(float c) {
  return c <= 0.04045f ? c / 12.92f : std::pow((c + 0.055f) / 1.055f, 2.4f);
}

float linear_to_srgb(float c) {
  return c <= 0.0031308f ? 12.92f * c : 1.055f * std::pow(c, 1.0f / 2.4f) - 0.055f;
}

struct ReadCursor {
  std::string_view bytes;
  std::size_t pos = 0;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->pos + count > cursor->bytes.size()) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, cursor->bytes.data() + cursor->pos, count);
  cursor->pos += count;
}

void write_to_string(png_structp png, png_bytep in, png_size_t count) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(in), count);
}

void flush_noop(png_structp) {}

// libpng reports errors by longjmp; messages are copied here before the jump.
void on_png_error(png_structp png, png_const_charp msg) {
  auto* buf = static_cast<char*>(png_get_error_ptr(png));
  std::strncpy(buf, msg, 255);
  buf[255] = '\0';
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

}  // namespace

ImageBuf to_luma(const ImageBuf& img) {
  if (img.channels == 1) return img;
  if (img.channels != 3) throw Error(ErrorCode::InvalidParameter, "expected 1 or 3 channels");
  ImageBuf out(img.width, img.height, 1);
  const auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  auto dst = out.plane(0);
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<float>(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]);
  }
  return out;
}

ImageBuf crop(const ImageBuf& img, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > img.width || y0 + h > img.height) {
    throw Error(ErrorCode::OutOfRange, "crop rectangle outside image");
  }
  ImageBuf out(w, h, img.channels);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = img.at(c, y0 + y, x0 + x);
  return out;
}

ImageBuf decode_png(std::string_view bytes, bool srgb_decode) {
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
    throw Error(ErrorCode::BadMagic, "not a PNG file");
  }
  char err[256] = "libpng error";
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, err, on_png_error, on_png_warning);
  if (!png) throw Error(ErrorCode::IoError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  ReadCursor cursor{bytes, 0};
  ImageBuf out;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    throw Error(ErrorCode::InvalidValue, std::string("PNG decode failed: ") + err);
  }
  png_set_read_fn(png, &cursor, read_from_memory);
  png_read_png(png, info, PNG_TRANSFORM_EXPAND | PNG_TRANSFORM_STRIP_ALPHA | PNG_TRANSFORM_PACKING, nullptr);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  png_bytepp rows = png_get_rows(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::InvalidValue, "unsupported PNG channel layout");
  }
  out = ImageBuf(w, h, channels);
  const float scale = depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
  for (int y = 0; y < h; ++y) {
    const png_bytep row = rows[y];
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        const std::size_t k = std::size_t(x) * channels + c;
        const unsigned value = depth == 16 ? (unsigned(row[2 * k]) << 8) | row[2 * k + 1] : row[k];
        float f = static_cast<float>(value) * scale;
        if (srgb_decode) f = srgb_to_linear(f);
        out.at(c, y, x) = f;
      }
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

ImageBuf read_png(const std::filesystem::path& path, bool srgb_decode) {
  return decode_png(read_file(path), srgb_decode);
}

std::string encode_png(const ImageBuf& img, int bit_depth, bool srgb_encode) {
  if (img.channels != 1 && img.channels != 3) throw Error(ErrorCode::InvalidParameter, "expected 1 or 3 channels");
  if (bit_depth != 8 && bit_depth != 16) throw Error(ErrorCode::InvalidParameter, "bit depth must be 8 or 16");
  if (img.width < 1 || img.height < 1) throw Error(ErrorCode::InvalidParameter, "empty image");

  const int bytes_per_sample = bit_depth / 8;
  const std::size_t stride = std::size_t(img.width) * img.channels * bytes_per_sample;
  std::vector<png_byte> pixels(stride * img.height);
  const double max_code = bit_depth == 16 ? 65535.0 : 255.0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        float f = std::clamp(img.at(c, y, x), 0.0f, 1.0f);
        if (!std::isfinite(f)) f = 0.0f;
        if (srgb_encode) f = linear_to_srgb(f);
        const auto code = static_cast<unsigned>(std::lround(f * max_code));
        png_byte* dst = &pixels[y * stride + (std::size_t(x) * img.channels + c) * bytes_per_sample];
        if (bit_depth == 16) {
          dst[0] = static_cast<png_byte>(code >> 8);
          dst[1] = static_cast<png_byte>(code & 0xff);
        } else {
          dst[0] = static_cast<png_byte>(code);
        }
      }
    }
  }
  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y) rows[y] = &pixels[y * stride];

  std::string encoded;
  char err[256] = "libpng error";
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, err, on_png_error, on_png_warning);
  if (!png) throw Error(ErrorCode::IoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, info ? &info : nullptr);
    throw Error(ErrorCode::IoError, std::string("PNG encode failed: ") + err);
  }
  png_set_write_fn(png, &encoded, write_to_string, flush_noop);
  png_set_IHDR(png, info, img.width, img.height, bit_depth,
               img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return encoded;
}

void write_png(const ImageBuf& img, const std::filesystem::path& path, int bit_depth, bool srgb_encode) {
  write_file(path, encode_png(img, bit_depth, srgb_encode));
}

}  // namespace gyrodeblur
