#include "lineglow/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <png.h>

namespace lineglow {

namespace {

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  Bytes out;

  PngWriter() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw ImageIoError("png_create_write_struct failed");
    info = png_create_info_struct(png);
    if (!info) {
      png_destroy_write_struct(&png, nullptr);
      throw ImageIoError("png_create_info_struct failed");
    }
  }
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;

  static void write_cb(png_structp p, png_bytep data, png_size_t len) {
    auto* self = static_cast<PngWriter*>(png_get_io_ptr(p));
    self->out.insert(self->out.end(), data, data + len);
  }
  static void flush_cb(png_structp) {}
};

// rows: one contiguous buffer of height * stride bytes.
Bytes write_png(int width, int height, int bit_depth, int color_type, const Bytes& rows, std::size_t stride,
                const std::vector<png_color>* palette = nullptr) {
  PngWriter w;
  if (setjmp(png_jmpbuf(w.png))) throw ImageIoError("libpng error while encoding");
  png_set_write_fn(w.png, &w, &PngWriter::write_cb, &PngWriter::flush_cb);
  png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (palette) png_set_PLTE(w.png, w.info, palette->data(), static_cast<int>(palette->size()));
  png_set_compression_level(w.png, 6);
  png_write_info(w.png, w.info);
  std::vector<png_bytep> ptrs(static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) {
    ptrs[static_cast<std::size_t>(r)] = const_cast<png_bytep>(rows.data() + static_cast<std::size_t>(r) * stride);
  }
  png_write_image(w.png, ptrs.data());
  png_write_end(w.png, nullptr);
  return std::move(w.out);
}

}  // namespace

Bytes encode_png(const ColorImage& image) {
  const int w = image.width(), h = image.height();
  Bytes rows(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    rows[3 * i] = image.pixels[i].r;
    rows[3 * i + 1] = image.pixels[i].g;
    rows[3 * i + 2] = image.pixels[i].b;
  }
  return write_png(w, h, 8, PNG_COLOR_TYPE_RGB, rows, static_cast<std::size_t>(w) * 3);
}

Bytes encode_intensity_png(const ScalarGrid& intensity) {
  const int w = intensity.width(), h = intensity.height();
  Bytes rows(static_cast<std::size_t>(w) * h * 2);
  for (std::size_t i = 0; i < intensity.size(); ++i) {
    const double u = std::clamp((intensity[i] + 1.0) * 0.5, 0.0, 1.0);
    const auto v = static_cast<std::uint16_t>(std::lround(u * 65535.0));
    rows[2 * i] = static_cast<std::uint8_t>(v >> 8);  // PNG is big-endian
    rows[2 * i + 1] = static_cast<std::uint8_t>(v & 0xff);
  }
  return write_png(w, h, 16, PNG_COLOR_TYPE_GRAY, rows, static_cast<std::size_t>(w) * 2);
}

Bytes encode_normals_png(const NormalGrid& normals) {
  const int w = normals.width(), h = normals.height();
  Bytes rows(static_cast<std::size_t>(w) * h * 3);
  auto q = [](double c) { return static_cast<std::uint8_t>(std::lround(std::clamp((c + 1.0) * 0.5, 0.0, 1.0) * 255.0)); };
  for (std::size_t i = 0; i < normals.normals.size(); ++i) {
    const Vec3& n = normals.normals[i];
    rows[3 * i] = q(n.x);
    rows[3 * i + 1] = q(n.y);
    rows[3 * i + 2] = q(n.z);
  }
  return write_png(w, h, 8, PNG_COLOR_TYPE_RGB, rows, static_cast<std::size_t>(w) * 3);
}

Bytes encode_provenance_png(const NormalGrid& normals) {
  const int w = normals.width(), h = normals.height();
  std::vector<png_color> palette(256);
  palette[0] = {255, 255, 255};
  palette[1] = {160, 160, 160};
  for (int i = 2; i < 256; ++i) {
    // Golden-angle hue walk so neighbouring line indices get distinct colors.
    const double hue = std::fmod((i - 2) * 137.508, 360.0);
    const Rgb8 c = to_rgb8(Hcl{hue, 45.0, 60.0});
    palette[static_cast<std::size_t>(i)] = {c.r, c.g, c.b};
  }
  Bytes rows(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < normals.provenance.size(); ++i) {
    const std::int32_t p = normals.provenance[i];
    rows[i] = p == kProvenanceEmpty ? 0 : p == kProvenanceLow ? 1 : static_cast<std::uint8_t>(2 + p % 254);
  }
  return write_png(w, h, 8, PNG_COLOR_TYPE_PALETTE, rows, static_cast<std::size_t>(w), &palette);
}

Grid<Rgb8> decode_png_rgb(const Bytes& png) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, png.data(), png.size())) {
    throw ImageIoError(std::string("png decode failed: ") + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  Bytes buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&img);
    throw ImageIoError(std::string("png decode failed: ") + img.message);
  }
  Grid<Rgb8> out(static_cast<int>(img.width), static_cast<int>(img.height));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]};
  return out;
}

void write_file(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageIoError("short write to " + path.string());
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot read " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

Bytes encode_float_grid(const ScalarGrid& grid) {
  Bytes out(grid.size() * 4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(grid[i]));
    for (int b = 0; b < 4; ++b) out[4 * i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return out;
}

}  // namespace lineglow
