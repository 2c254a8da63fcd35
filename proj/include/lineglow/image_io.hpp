#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "lineglow/composition.hpp"
#include "lineglow/grid.hpp"
#include "lineglow/structure_normals.hpp"

namespace lineglow {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Bytes = std::vector<std::uint8_t>;

/// 8-bit RGB PNG, no alpha.
Bytes encode_png(const ColorImage& image);
/// 16-bit grayscale PNG of I mapped from [-1, 1] to [0, 65535].
Bytes encode_intensity_png(const ScalarGrid& intensity);
/// RGB PNG of (n + 1) / 2 per channel.
Bytes encode_normals_png(const NormalGrid& normals);
/// Indexed PNG of provenance: 0 empty, 1 low frequency, 2.. high frequency (line index mod 254).
Bytes encode_provenance_png(const NormalGrid& normals);

/// Decodes an 8-bit RGB PNG (as written by encode_png).
Grid<Rgb8> decode_png_rgb(const Bytes& png);

void write_file(const std::filesystem::path& path, const Bytes& bytes);
Bytes read_file(const std::filesystem::path& path);

/// Row-major little-endian float32 dump, preceded by no header.
Bytes encode_float_grid(const ScalarGrid& grid);

}  // namespace lineglow
