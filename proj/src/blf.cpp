#include "gyrodeblur/blf.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>

#include "gyrodeblur/error.hpp"
#include "gyrodeblur/file_io.hpp"

namespace gyrodeblur {

namespace {

constexpr char kMagic[4] = {'B', 'L', 'F', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

void put_plane(std::string& out, const std::vector<double>& plane) {
  for (double d : plane) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(d)));
}

}  // namespace

std::string encode_blf(const BlurField& field) {
  std::string out(kMagic, 4);
  out.reserve(12 + 8 * field.u.size());
  put_u32(out, static_cast<std::uint32_t>(field.width));
  put_u32(out, static_cast<std::uint32_t>(field.height));
  put_plane(out, field.u);
  put_plane(out, field.v);
  return out;
}

BlurField decode_blf(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "not a BLF1 file");
  }
  if (bytes.size() < 12) throw Error(ErrorCode::TruncatedData, "BLF header truncated");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t w = get_u32(p + 4);
  const std::uint32_t h = get_u32(p + 8);
  if (w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16)) {
    throw Error(ErrorCode::InvalidValue, "BLF dimensions out of range");
  }
  const std::size_t n = std::size_t(w) * h;
  if (bytes.size() != 12 + 8 * n) throw Error(ErrorCode::TruncatedData, "BLF payload size does not match header");

  BlurField field(static_cast<int>(w), static_cast<int>(h));
  const unsigned char* src = p + 12;
  for (auto* plane : {&field.u, &field.v}) {
    for (std::size_t i = 0; i < n; ++i, src += 4) {
      const float f = std::bit_cast<float>(get_u32(src));
      if (!std::isfinite(f)) throw Error(ErrorCode::InvalidValue, "BLF contains non-finite values");
      (*plane)[i] = f;
    }
  }
  return field;
}

void write_blf(const BlurField& field, const std::filesystem::path& path) { write_file(path, encode_blf(field)); }

BlurField read_blf(const std::filesystem::path& path) { return decode_blf(read_file(path)); }

ImageBuf render_field(const BlurField& field) {
  ImageBuf out(field.width, field.height, 3, 1.0f);
  const double max_mag = field.max_magnitude();
  if (max_mag <= 0.0) return out;
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) {
      const auto i = field.index(x, y);
      const double sat = std::hypot(field.u[i], field.v[i]) / max_mag;
      double hue = std::atan2(field.v[i], field.u[i]) / (2.0 * std::numbers::pi);
      if (hue < 0.0) hue += 1.0;
      // HSV -> RGB with V = 1.
      const double h6 = hue * 6.0;
      const int sector = static_cast<int>(h6) % 6;
      const double f = h6 - std::floor(h6);
      const double p = 1.0 - sat, q = 1.0 - sat * f, t = 1.0 - sat * (1.0 - f);
      double r = 1.0, g = 1.0, b = 1.0;
      switch (sector) {
        case 0: r = 1; g = t; b = p; break;
        case 1: r = q; g = 1; b = p; break;
        case 2: r = p; g = 1; b = t; break;
        case 3: r = p; g = q; b = 1; break;
        case 4: r = t; g = p; b = 1; break;
        default: r = 1; g = p; b = q; break;
      }
      out.at(0, y, x) = static_cast<float>(r);
      out.at(1, y, x) = static_cast<float>(g);
      out.at(2, y, x) = static_cast<float>(b);
    }
  }
  return out;
}

}  // namespace gyrodeblur
