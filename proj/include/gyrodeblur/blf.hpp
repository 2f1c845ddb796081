#pragma once

// BLF blur-field files:
//   "BLF1" | u32 LE width | u32 LE height | U plane f32 LE | V plane f32 LE
// Planes are row-major.

#include <filesystem>
#include <string>
#include <string_view>

#include "gyrodeblur/blurfield.hpp"
#include "gyrodeblur/image.hpp"

namespace gyrodeblur {

std::string encode_blf(const BlurField& field);
/// Throws BadMagic, TruncatedData, or InvalidValue (non-finite entries).
BlurField decode_blf(std::string_view bytes);

void write_blf(const BlurField& field, const std::filesystem::path& path);
BlurField read_blf(const std::filesystem::path& path);

/// Colour-wheel rendering: hue = blur direction, saturation = magnitude
/// relative to the field maximum, full value. Returns an RGB image.
ImageBuf render_field(const BlurField& field);

}  // namespace gyrodeblur
