#pragma once

#include <cmath>
#include <optional>

#include "lfdisp/errors.hpp"
#include "lfdisp/image.hpp"

namespace lfdisp {

// Two-plane viewpoint geometry. F is the separation between the viewpoint
// plane and the image plane, (u0,v0) the central viewpoint, and
// baseline_step the physical viewpoint spacing per angular index.
struct Calibration {
  double F = 1.0;
  double u0 = 0.0;
  double v0 = 0.0;
  double baseline_step = 1.0;
};

// 3D scene point; z is the depth and must be positive.
struct ScenePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Projects pixel (x,y) with depth d onto the viewpoint plane.
inline ScenePoint point_from_depth(double x, double y, double d,
                                   const Calibration& cal) {
  if (!(d > 0.0)) throw NonPositiveDepth("depth must be positive");
  return {-cal.F * x / d + cal.u0, -cal.F * y / d + cal.v0, d};
}

// Same scene point expressed through the disparity instead of the depth.
inline ScenePoint point_from_disparity(double x, double y, double disp,
                                       const Calibration& cal) {
  if (disp == 1.0) throw UnitDisparity("disparity 1 puts depth at infinity");
  const double s = disp - 1.0;
  return {-x * s + cal.u0, -y * s + cal.v0, cal.F / s};
}

// Image coordinates of central-view pixel (x,y) seen from viewpoint (u,v).
// The result may be fractional or outside the image; the caller decides.
inline std::pair<double, double> reproject(double x, double y, double disp,
                                           double u, double v,
                                           const Calibration& cal) {
  return {x + (u - cal.u0) * disp, y + (v - cal.v0) * disp};
}

// Bilinear sample at fractional coordinates. Coordinates outside
// [0,W-1]x[0,H-1] return nullopt instead of a clamped value.
inline std::optional<float> sample_bilinear(const Image& img, double x,
                                            double y) {
  const int w = img.width();
  const int h = img.height();
  if (w == 0 || h == 0) return std::nullopt;
  if (x < 0.0 || y < 0.0 || x > double(w - 1) || y > double(h - 1))
    return std::nullopt;

  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  if (x0 > w - 2) x0 = w - 2;  // x == w-1 exactly
  if (y0 > h - 2) y0 = h - 2;
  if (x0 < 0) x0 = 0;  // w == 1
  if (y0 < 0) y0 = 0;

  const double fx = x - x0;
  const double fy = y - y0;
  const int x1 = (w == 1) ? x0 : x0 + 1;
  const int y1 = (h == 1) ? y0 : y0 + 1;

  const double v00 = img.at(x0, y0);
  const double v10 = img.at(x1, y0);
  const double v01 = img.at(x0, y1);
  const double v11 = img.at(x1, y1);
  const double top = v00 + (v10 - v00) * fx;
  const double bot = v01 + (v11 - v01) * fx;
  return static_cast<float>(top + (bot - top) * fy);
}

}  // namespace lfdisp
