#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lfdisp/errors.hpp"
#include "lfdisp/geometry.hpp"
#include "lfdisp/image.hpp"
#include "lfdisp/png_io.hpp"

namespace lfdisp {

// 4D light field stored as a U x V array of grayscale sub-aperture views.
// View (u,v) lives at index v*U + u; u grows left to right, v top to bottom.
struct LightField {
  int angular_u = 0;  // U
  int angular_v = 0;  // V
  int width = 0;      // W
  int height = 0;     // H
  std::vector<Image> views;

  const Image& view(int u, int v) const {
    return views[static_cast<size_t>(v) * angular_u + u];
  }
  Image& view(int u, int v) {
    return views[static_cast<size_t>(v) * angular_u + u];
  }

  int center_u() const { return (angular_u - 1) / 2; }
  int center_v() const { return (angular_v - 1) / 2; }
};

inline const Image& central_view(const LightField& lf) {
  return lf.view(lf.center_u(), lf.center_v());
}

// Makes the calibration implied by a light field's angular grid: the central
// viewpoint sits at ((U-1)/2, (V-1)/2) in angular index units.
struct SceneConfig;
inline Calibration calibration_for(const LightField& lf,
                                   double focus_distance = 1.0,
                                   double baseline_step = 1.0) {
  Calibration cal;
  cal.F = focus_distance;
  cal.u0 = lf.center_u();
  cal.v0 = lf.center_v();
  cal.baseline_step = baseline_step;
  return cal;
}

// Scene-level configuration read from a plain key=value file.
struct SceneConfig {
  double disparity_min = 0.0;
  double disparity_max = 0.0;
  double focus_distance = 1.0;
  double baseline_step = 1.0;
  std::optional<std::string> ground_truth_path;

  void validate() const {
    if (!(disparity_min < disparity_max))
      throw BadConfig("disp_min must be less than disp_max");
    if (!(focus_distance > 0.0)) throw BadConfig("focus_distance must be > 0");
    if (!(baseline_step > 0.0)) throw BadConfig("baseline must be > 0");
  }
};

// Parses `key = value` lines. Blank lines, comments (# or ;) and ini-style
// [section] headers are ignored so benchmark parameter files load as-is.
inline SceneConfig parse_scene_config(std::istream& in) {
  SceneConfig cfg;
  bool have_min = false, have_max = false;
  std::string line;
  while (std::getline(in, line)) {
    size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#' || line[start] == ';' || line[start] == '[')
      continue;
    size_t eq = line.find('=', start);
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(start, eq - start));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "disp_min") {
        cfg.disparity_min = std::stod(val);
        have_min = true;
      } else if (key == "disp_max") {
        cfg.disparity_max = std::stod(val);
        have_max = true;
      } else if (key == "focus_distance") {
        cfg.focus_distance = std::stod(val);
      } else if (key == "baseline") {
        cfg.baseline_step = std::stod(val);
      } else if (key == "ground_truth") {
        cfg.ground_truth_path = val;
      }
    } catch (const std::exception&) {
      throw BadConfig("cannot parse value for key '" + key + "'");
    }
  }
  if (!have_min || !have_max)
    throw BadConfig("config must set disp_min and disp_max");
  cfg.validate();
  return cfg;
}

inline SceneConfig load_scene_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadConfig("cannot open config file " + path);
  return parse_scene_config(in);
}

inline void write_scene_config(const SceneConfig& cfg,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "disp_min = " << cfg.disparity_min << "\n";
  out << "disp_max = " << cfg.disparity_max << "\n";
  out << "focus_distance = " << cfg.focus_distance << "\n";
  out << "baseline = " << cfg.baseline_step << "\n";
  if (cfg.ground_truth_path) out << "ground_truth = " << *cfg.ground_truth_path << "\n";
}

namespace detail {

inline std::string view_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "input_Cam%03d.png", index);
  return buf;
}

}  // namespace detail

// Loads a directory of views named input_Cam000.png .. input_CamNNN.png in
// row-major order: file index i holds view (u,v) = (i % U, i / U). The
// angular resolution is inferred from the highest present index and must be
// an odd square so a central viewpoint exists.
inline LightField load_lightfield(const std::string& directory,
                                  const SceneConfig& config) {
  namespace fs = std::filesystem;
  config.validate();

  int max_index = -1;
  for (const auto& entry : fs::directory_iterator(directory)) {
    const std::string name = entry.path().filename().string();
    int idx = -1;
    if (std::sscanf(name.c_str(), "input_Cam%d.png", &idx) == 1 && idx >= 0)
      max_index = std::max(max_index, idx);
  }
  if (max_index < 0) throw MissingView(0);

  const int count = max_index + 1;
  const int side = static_cast<int>(std::lround(std::sqrt(double(count))));
  if (side * side != count)
    throw BadConfig("view count " + std::to_string(count) +
                    " is not a square angular grid");
  if (side % 2 == 0)
    throw BadConfig("angular resolution " + std::to_string(side) +
                    " is even; a central viewpoint is required");

  LightField lf;
  lf.angular_u = side;
  lf.angular_v = side;
  lf.views.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const fs::path p = fs::path(directory) / detail::view_file_name(i);
    if (!fs::exists(p)) throw MissingView(i);
    Image img = read_png_gray(p.string());
    if (i == 0) {
      lf.width = img.width();
      lf.height = img.height();
    } else if (img.width() != lf.width || img.height() != lf.height) {
      throw ShapeMismatch("view " + std::to_string(i) +
                          " has inconsistent dimensions");
    }
    lf.views.push_back(std::move(img));
  }
  return lf;
}

}  // namespace lfdisp
