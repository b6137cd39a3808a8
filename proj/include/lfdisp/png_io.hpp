#pragma once

#include <png.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "lfdisp/errors.hpp"
#include "lfdisp/image.hpp"

namespace lfdisp {

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace detail

// Reads any 8/16-bit gray, palette, RGB or RGBA PNG and converts it to a
// grayscale radiance image in [0,1] using Rec. 601 luma weights.
inline Image read_png_gray(const std::string& path) {
  detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png_create_info_struct failed");
  }

  std::vector<uint16_t> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 w = 0, h = 0;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode " + path);
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);
  w = png_get_image_width(png, info);
  h = png_get_image_height(png, info);

  // Normalize every input to host-order 16-bit RGB rows.
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_expand_16(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
      png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  if constexpr (std::endian::native == std::endian::little) png_set_swap(png);
  png_read_update_info(png, info);

  pixels.resize(size_t(w) * h * 3);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y)
    rows[y] = reinterpret_cast<png_bytep>(pixels.data() + size_t(y) * w * 3);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(static_cast<int>(w), static_cast<int>(h));
  for (png_uint_32 y = 0; y < h; ++y) {
    const uint16_t* src = pixels.data() + size_t(y) * w * 3;
    float* dst = img.row(static_cast<int>(y));
    for (png_uint_32 x = 0; x < w; ++x) {
      const double r = src[3 * x + 0] / 65535.0;
      const double g = src[3 * x + 1] / 65535.0;
      const double b = src[3 * x + 2] / 65535.0;
      dst[x] = static_cast<float>(0.299 * r + 0.587 * g + 0.114 * b);
    }
  }
  return img;
}

namespace detail {

inline void write_png_impl(const std::string& path, int width, int height,
                           int bit_depth, int color_type,
                           std::vector<png_bytep>& rows) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot open " + path + " for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode " + path);
  }

  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16 && std::endian::native == std::endian::little)
    png_set_swap(png);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace detail

// Writes a radiance image as 16-bit grayscale PNG.
inline void write_png_gray16(const Image& img, const std::string& path) {
  const int w = img.width(), h = img.height();
  std::vector<uint16_t> pixels(size_t(w) * h);
  for (int y = 0; y < h; ++y) {
    const float* src = img.row(y);
    uint16_t* dst = pixels.data() + size_t(y) * w;
    for (int x = 0; x < w; ++x) {
      double v = src[x];
      if (v < 0.0) v = 0.0;
      if (v > 1.0) v = 1.0;
      dst[x] = static_cast<uint16_t>(std::lround(v * 65535.0));
    }
  }
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = reinterpret_cast<png_bytep>(pixels.data() + size_t(y) * w);
  detail::write_png_impl(path, w, h, 16, PNG_COLOR_TYPE_GRAY, rows);
}

// Writes an 8-bit grayscale PNG from values already scaled to [0,1].
inline void write_png_gray8(const Image& img, const std::string& path) {
  const int w = img.width(), h = img.height();
  std::vector<uint8_t> pixels(size_t(w) * h);
  for (int y = 0; y < h; ++y) {
    const float* src = img.row(y);
    uint8_t* dst = pixels.data() + size_t(y) * w;
    for (int x = 0; x < w; ++x) {
      double v = src[x];
      if (v < 0.0) v = 0.0;
      if (v > 1.0) v = 1.0;
      dst[x] = static_cast<uint8_t>(std::lround(v * 255.0));
    }
  }
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = reinterpret_cast<png_bytep>(pixels.data() + size_t(y) * w);
  detail::write_png_impl(path, w, h, 8, PNG_COLOR_TYPE_GRAY, rows);
}

using Rgb8 = std::array<uint8_t, 3>;

// Writes an 8-bit RGB PNG (region visualizations and renders).
inline void write_png_rgb8(const Grid<Rgb8>& img, const std::string& path) {
  const int w = img.width(), h = img.height();
  std::vector<uint8_t> pixels(size_t(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    const Rgb8* src = img.row(y);
    uint8_t* dst = pixels.data() + size_t(y) * w * 3;
    for (int x = 0; x < w; ++x) {
      dst[3 * x + 0] = src[x][0];
      dst[3 * x + 1] = src[x][1];
      dst[3 * x + 2] = src[x][2];
    }
  }
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = reinterpret_cast<png_bytep>(pixels.data() + size_t(y) * w * 3);
  detail::write_png_impl(path, w, h, 8, PNG_COLOR_TYPE_RGB, rows);
}

}  // namespace lfdisp
