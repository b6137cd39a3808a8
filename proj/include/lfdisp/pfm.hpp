#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "lfdisp/errors.hpp"
#include "lfdisp/image.hpp"

namespace lfdisp {

namespace detail {

inline uint32_t bswap32(uint32_t v) {
  return ((v & 0xff000000u) >> 24) | ((v & 0x00ff0000u) >> 8) |
         ((v & 0x0000ff00u) << 8) | ((v & 0x000000ffu) << 24);
}

inline std::string next_pfm_token(std::istream& in) {
  std::string tok;
  in >> tok;
  return tok;
}

}  // namespace detail

// Reads a grayscale PFM ("Pf") file. The scale line's sign encodes the
// payload endianness; rows are stored bottom-up per the format convention.
// Non-finite samples (NaN holes) become invalid pixels.
inline DisparityMap read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BadHeader("cannot open " + path);

  const std::string magic = detail::next_pfm_token(in);
  if (magic != "Pf") {
    if (magic == "PF")
      throw BadHeader("color PFM not supported, expected grayscale 'Pf'");
    throw BadHeader("not a PFM file: bad magic '" + magic + "'");
  }

  int w = 0, h = 0;
  double scale = 0.0;
  if (!(in >> w >> h >> scale) || w <= 0 || h <= 0 || scale == 0.0)
    throw BadHeader("malformed PFM dimensions or scale");
  in.get();  // single whitespace byte before the payload

  const size_t n = static_cast<size_t>(w) * static_cast<size_t>(h);
  std::vector<uint32_t> raw(n);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(n * sizeof(uint32_t)));
  if (static_cast<size_t>(in.gcount()) != n * sizeof(uint32_t))
    throw TruncatedPayload("PFM payload shorter than W*H floats");

  const bool file_little = scale < 0.0;
  const bool host_little = std::endian::native == std::endian::little;
  if (file_little != host_little)
    for (uint32_t& v : raw) v = detail::bswap32(v);

  DisparityMap map(w, h);
  for (int y = 0; y < h; ++y) {
    const uint32_t* src = raw.data() + static_cast<size_t>(h - 1 - y) * w;
    float* dst = map.values.row(y);
    uint8_t* val = map.valid.row(y);
    for (int x = 0; x < w; ++x) {
      float f;
      std::memcpy(&f, &src[x], sizeof(float));
      dst[x] = f;
      val[x] = std::isfinite(f) ? 1 : 0;
    }
  }
  return map;
}

// Writes a grayscale PFM in host endianness. Invalid pixels are stored as
// quiet NaN so the round trip preserves the validity mask; finite values
// survive bit-exactly.
inline void write_pfm(const DisparityMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");

  const int w = map.width();
  const int h = map.height();
  const bool host_little = std::endian::native == std::endian::little;
  out << "Pf\n" << w << " " << h << "\n" << (host_little ? "-1.0" : "1.0")
      << "\n";

  std::vector<float> row(static_cast<size_t>(w));
  for (int y = h - 1; y >= 0; --y) {
    const float* src = map.values.row(y);
    const uint8_t* val = map.valid.row(y);
    for (int x = 0; x < w; ++x)
      row[x] = val[x] ? src[x] : std::numeric_limits<float>::quiet_NaN();
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw IoError("short write to " + path);
}

}  // namespace lfdisp
