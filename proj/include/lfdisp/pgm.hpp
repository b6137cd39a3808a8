#pragma once

#include <fstream>
#include <string>

#include "lfdisp/errors.hpp"
#include "lfdisp/region.hpp"

namespace lfdisp {

// Raw label image: binary P5 with maxval 255, one byte per pixel.
inline void write_pgm_labels(const RegionMap& regions,
                             const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "P5\n" << regions.width() << " " << regions.height() << "\n255\n";
  for (int y = 0; y < regions.height(); ++y)
    for (int x = 0; x < regions.width(); ++x)
      out.put(static_cast<char>(static_cast<uint8_t>(regions.at(x, y))));
  if (!out) throw IoError("short write to " + path);
}

inline RegionMap read_pgm_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BadHeader("cannot open " + path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255)
    throw BadHeader("expected a binary P5 label image");
  in.get();
  RegionMap regions(w, h, Region::Texture);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int c = in.get();
      if (c == EOF) throw TruncatedPayload("PGM payload short");
      if (c > 3) throw BadHeader("label value out of range");
      regions.at(x, y) = static_cast<Region>(c);
    }
  return regions;
}

}  // namespace lfdisp
