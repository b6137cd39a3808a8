#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lfdisp/errors.hpp"
#include "lfdisp/geometry.hpp"
#include "lfdisp/image.hpp"
#include "lfdisp/lightfield.hpp"
#include "lfdisp/region.hpp"

namespace lfdisp {

// Inclusive pixel rectangle in central-view coordinates.
struct RectI {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
};

// A fronto-parallel textured layer at a fixed disparity.
struct LayerSpec {
  enum class Texture : uint8_t { Noise, Checker, Constant };

  Texture texture = Texture::Noise;
  uint32_t seed = 1;    // noise
  double sigma = 0.2;   // noise amplitude around 0.5
  int period = 8;       // checker
  double value = 0.5;   // constant
  double disparity = 0.0;
  std::optional<RectI> support;  // nullopt covers the full frame
};

// Scene description: layers are listed back to front.
struct SceneSpec {
  int angular_u = 9;
  int angular_v = 9;
  int width = 96;
  int height = 96;
  std::vector<LayerSpec> layers;
  double noise_sigma = 0.0;  // post-render sensor noise
  uint32_t noise_seed = 7;
};

struct SynthResult {
  LightField lf;
  DisparityMap gt;
  RegionMap gt_regions;
  Grid<uint8_t> occluding_band;
  Grid<uint8_t> occluded_band;
};

namespace detail {

inline Image make_texture(const LayerSpec& layer, int w, int h) {
  Image img(w, h);
  switch (layer.texture) {
    case LayerSpec::Texture::Noise: {
      std::mt19937 gen(layer.seed);
      std::normal_distribution<double> nd(0.5, layer.sigma);
      for (float& px : img.data())
        px = static_cast<float>(std::clamp(nd(gen), 0.0, 1.0));
      break;
    }
    case LayerSpec::Texture::Checker: {
      const int p = std::max(1, layer.period);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          img.at(x, y) = ((x / p + y / p) % 2) ? 0.75f : 0.25f;
      break;
    }
    case LayerSpec::Texture::Constant:
      std::fill(img.data().begin(), img.data().end(),
                static_cast<float>(std::clamp(layer.value, 0.0, 1.0)));
      break;
  }
  return img;
}

// Full-frame layers behave like backgrounds that extend past the frame:
// they cover every position and their texture is edge-extended. Layers with
// an explicit support are bounded objects with hard edges.
inline bool layer_covers(const LayerSpec& layer, double x, double y) {
  if (layer.support) return layer.support->contains(x, y);
  return true;
}

inline void validate_scene(const SceneSpec& spec) {
  if (spec.layers.empty()) throw BadSpec("scene needs at least one layer");
  if (spec.width <= 0 || spec.height <= 0)
    throw BadSpec("spatial resolution must be positive");
  if (spec.angular_u <= 0 || spec.angular_v <= 0 || spec.angular_u % 2 == 0 ||
      spec.angular_v % 2 == 0)
    throw BadSpec("angular resolution must be positive and odd");
  if (spec.noise_sigma < 0.0) throw BadSpec("noise sigma must be >= 0");
  for (const LayerSpec& l : spec.layers) {
    if (l.support) {
      const RectI& r = *l.support;
      if (r.x0 > r.x1 || r.y0 > r.y1 || r.x0 < 0 || r.y0 < 0 ||
          r.x1 >= spec.width || r.y1 >= spec.height)
        throw BadSpec("layer support rectangle out of frame");
    }
  }
  // Later (front) layers must be strictly nearer wherever supports overlap.
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    for (size_t j = i + 1; j < spec.layers.size(); ++j) {
      const auto& a = spec.layers[i];
      const auto& b = spec.layers[j];
      const RectI ra = a.support.value_or(
          RectI{0, 0, spec.width - 1, spec.height - 1});
      const RectI rb = b.support.value_or(
          RectI{0, 0, spec.width - 1, spec.height - 1});
      const bool overlap = ra.x0 <= rb.x1 && rb.x0 <= ra.x1 &&
                           ra.y0 <= rb.y1 && rb.y0 <= ra.y1;
      if (overlap && !(b.disparity > a.disparity))
        throw BadSpec("overlapping layers must be listed back to front with "
                      "increasing disparity");
    }
  }
}

}  // namespace detail

// Renders a light field by inverse-warping every layer into every view,
// front to back, together with the exact ground truth: disparity of the
// front-most layer per central pixel, occlusion bands computed from the
// layer geometry, and the region labels they imply.
inline SynthResult render(const SceneSpec& spec) {
  detail::validate_scene(spec);
  const int w = spec.width, h = spec.height;
  const int nl = static_cast<int>(spec.layers.size());

  std::vector<Image> textures;
  textures.reserve(spec.layers.size());
  for (const LayerSpec& l : spec.layers)
    textures.push_back(detail::make_texture(l, w, h));

  SynthResult out;
  out.lf.angular_u = spec.angular_u;
  out.lf.angular_v = spec.angular_v;
  out.lf.width = w;
  out.lf.height = h;
  out.lf.views.resize(size_t(spec.angular_u) * spec.angular_v);

  const int uc = (spec.angular_u - 1) / 2;
  const int vc = (spec.angular_v - 1) / 2;
  for (int v = 0; v < spec.angular_v; ++v) {
    for (int u = 0; u < spec.angular_u; ++u) {
      Image img(w, h, 0.0f);
      const double du = u - uc, dv = v - vc;
#pragma omp parallel for schedule(static)
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          for (int li = nl - 1; li >= 0; --li) {
            const LayerSpec& l = spec.layers[li];
            double sx = x - du * l.disparity;
            double sy = y - dv * l.disparity;
            if (!detail::layer_covers(l, sx, sy)) continue;
            if (!l.support) {  // edge-extended background
              sx = std::clamp(sx, 0.0, double(w - 1));
              sy = std::clamp(sy, 0.0, double(h - 1));
            }
            const auto s = sample_bilinear(textures[li], sx, sy);
            if (!s) continue;
            img.at(x, y) = *s;
            break;
          }
        }
      }
      out.lf.view(u, v) = std::move(img);
    }
  }

  // Ground truth disparity and the index of the visible layer per pixel.
  out.gt = DisparityMap(w, h);
  Grid<int> visible(w, h, -1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int li = nl - 1; li >= 0; --li) {
        if (detail::layer_covers(spec.layers[li], x, y)) {
          visible.at(x, y) = li;
          out.gt.values.at(x, y) =
              static_cast<float>(spec.layers[li].disparity);
          out.gt.valid.at(x, y) = 1;
          break;
        }
      }
    }
  }

  // Exact occlusion bands by exhaustive per-view visibility checks.
  out.occluding_band = Grid<uint8_t>(w, h, 0);
  out.occluded_band = Grid<uint8_t>(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int li = visible.at(x, y);
      if (li < 0) continue;
      const double dl = spec.layers[li].disparity;
      bool occluded = false, occluding = false;
      for (int v = 0; v < spec.angular_v && !(occluded && occluding); ++v) {
        for (int u = 0; u < spec.angular_u && !(occluded && occluding); ++u) {
          const double du = u - uc, dv = v - vc;
          for (int j = 0; j < nl; ++j) {
            if (j == li) continue;
            const double dj = spec.layers[j].disparity;
            const double px = x + du * (dl - dj);
            const double py = y + dv * (dl - dj);
            if (!detail::layer_covers(spec.layers[j], px, py)) continue;
            if (dj > dl) {
              occluded = true;  // a nearer layer covers this point here
            } else {
              // this pixel hides a point of layer j that is itself visible
              // in the central view
              const int ix = static_cast<int>(std::lround(px));
              const int iy = static_cast<int>(std::lround(py));
              if (visible.in_bounds(ix, iy) && visible.at(ix, iy) == j)
                occluding = true;
            }
          }
        }
      }
      out.occluded_band.at(x, y) = occluded ? 1 : 0;
      out.occluding_band.at(x, y) = occluding ? 1 : 0;
    }
  }

  out.gt_regions = RegionMap(w, h, Region::Texture);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (out.occluded_band.at(x, y)) {
        out.gt_regions.at(x, y) = Region::Occluded;
      } else if (out.occluding_band.at(x, y)) {
        out.gt_regions.at(x, y) = Region::Occluding;
      } else {
        const int li = visible.at(x, y);
        const bool flat =
            li >= 0 &&
            spec.layers[li].texture == LayerSpec::Texture::Constant;
        out.gt_regions.at(x, y) = flat ? Region::Smooth : Region::Texture;
      }
    }
  }

  if (spec.noise_sigma > 0.0) {
    std::mt19937 gen(spec.noise_seed);
    std::normal_distribution<double> nd(0.0, spec.noise_sigma);
    for (Image& view : out.lf.views)
      for (float& px : view.data())
        px = static_cast<float>(std::clamp(double(px) + nd(gen), 0.0, 1.0));
  }
  return out;
}

// Adds i.i.d. Gaussian noise clamped to [0,1], deterministic per seed.
inline LightField add_noise(const LightField& lf, double sigma,
                            uint32_t seed) {
  if (sigma < 0.0) throw BadSpec("noise sigma must be >= 0");
  LightField out = lf;
  if (sigma == 0.0) return out;
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd(0.0, sigma);
  for (Image& view : out.views)
    for (float& px : view.data())
      px = static_cast<float>(std::clamp(double(px) + nd(gen), 0.0, 1.0));
  return out;
}

// Parses a scene description in key=value form. Layers are given back to
// front, one per line:
//   layer = noise:<seed>:<sigma> disp=<d> [rect=x0,y0,x1,y1]
//   layer = checker:<period>     disp=<d> [rect=...]
//   layer = constant:<value>     disp=<d> [rect=...]
inline SceneSpec parse_scene_spec(std::istream& in) {
  SceneSpec spec;
  spec.layers.clear();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#' || line[start] == ';') continue;
    const size_t eq = line.find('=', start);
    if (eq == std::string::npos)
      throw BadSpec("scene line " + std::to_string(lineno) +
                    ": expected key = value");
    auto trim = [](std::string s) {
      const size_t a = s.find_first_not_of(" \t\r");
      const size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(start, eq - start));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "angular") {
        spec.angular_u = spec.angular_v = std::stoi(val);
      } else if (key == "angular_u") {
        spec.angular_u = std::stoi(val);
      } else if (key == "angular_v") {
        spec.angular_v = std::stoi(val);
      } else if (key == "width") {
        spec.width = std::stoi(val);
      } else if (key == "height") {
        spec.height = std::stoi(val);
      } else if (key == "noise_sigma") {
        spec.noise_sigma = std::stod(val);
      } else if (key == "noise_seed") {
        spec.noise_seed = static_cast<uint32_t>(std::stoul(val));
      } else if (key == "layer") {
        LayerSpec layer;
        std::istringstream toks(val);
        std::string tok;
        bool have_texture = false, have_disp = false;
        while (toks >> tok) {
          if (tok.rfind("disp=", 0) == 0) {
            layer.disparity = std::stod(tok.substr(5));
            have_disp = true;
          } else if (tok.rfind("rect=", 0) == 0) {
            RectI r;
            if (std::sscanf(tok.c_str() + 5, "%d,%d,%d,%d", &r.x0, &r.y0,
                            &r.x1, &r.y1) != 4)
              throw BadSpec("bad rect in layer");
            layer.support = r;
          } else {
            std::istringstream parts(tok);
            std::string kind;
            std::getline(parts, kind, ':');
            std::string p1, p2;
            std::getline(parts, p1, ':');
            std::getline(parts, p2, ':');
            if (kind == "noise") {
              layer.texture = LayerSpec::Texture::Noise;
              if (!p1.empty()) layer.seed = static_cast<uint32_t>(std::stoul(p1));
              if (!p2.empty()) layer.sigma = std::stod(p2);
            } else if (kind == "checker") {
              layer.texture = LayerSpec::Texture::Checker;
              if (!p1.empty()) layer.period = std::stoi(p1);
            } else if (kind == "constant") {
              layer.texture = LayerSpec::Texture::Constant;
              if (!p1.empty()) layer.value = std::stod(p1);
            } else {
              throw BadSpec("unknown texture kind '" + kind + "'");
            }
            have_texture = true;
          }
        }
        if (!have_texture || !have_disp)
          throw BadSpec("layer needs a texture and disp=");
        spec.layers.push_back(layer);
      }
    } catch (const BadSpec&) {
      throw;
    } catch (const std::exception&) {
      throw BadSpec("scene line " + std::to_string(lineno) +
                    ": cannot parse value for '" + key + "'");
    }
  }
  return spec;
}

inline SceneSpec load_scene_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadSpec("cannot open scene spec " + path);
  return parse_scene_spec(in);
}

}  // namespace lfdisp
