#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "lfdisp/errors.hpp"

namespace lfdisp {

// Preset matching window shapes: the full square plus four half windows and
// four quadrant windows, each anchored so the anchor pixel stays inside.
enum class WindowShape : uint8_t {
  Square = 0,
  W1 = 1,  // opens left
  W2 = 2,  // opens right
  W3 = 3,  // opens up
  W4 = 4,  // opens down
  W5 = 5,  // opens up-left
  W6 = 6,  // opens up-right
  W7 = 7,  // opens down-left
  W8 = 8,  // opens down-right
};

constexpr int kShapeCount = 9;
constexpr int kMinWindowSide = 3;
constexpr int kMaxWindowSide = 15;

// Unit direction the shape opens toward; (0,0) for the square.
inline std::pair<int, int> shape_direction(WindowShape s) {
  switch (s) {
    case WindowShape::Square: return {0, 0};
    case WindowShape::W1: return {-1, 0};
    case WindowShape::W2: return {1, 0};
    case WindowShape::W3: return {0, -1};
    case WindowShape::W4: return {0, 1};
    case WindowShape::W5: return {-1, -1};
    case WindowShape::W6: return {1, -1};
    case WindowShape::W7: return {-1, 1};
    case WindowShape::W8: return {1, 1};
  }
  return {0, 0};
}

// Inclusive anchor-relative offset rectangle. Every preset mask is a
// rectangle, which keeps window sums O(1) with summed-area tables.
struct OffsetRect {
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;

  int count() const { return (x1 - x0 + 1) * (y1 - y0 + 1); }
  bool contains(int m, int n) const {
    return m >= x0 && m <= x1 && n >= y0 && n <= y1;
  }

  // Intersects the mask with the image bounds around the given anchor.
  OffsetRect clipped(int anchor_x, int anchor_y, int width, int height) const {
    OffsetRect r = *this;
    if (anchor_x + r.x0 < 0) r.x0 = -anchor_x;
    if (anchor_x + r.x1 > width - 1) r.x1 = width - 1 - anchor_x;
    if (anchor_y + r.y0 < 0) r.y0 = -anchor_y;
    if (anchor_y + r.y1 > height - 1) r.y1 = height - 1 - anchor_y;
    return r;
  }

  bool valid() const { return x0 <= x1 && y0 <= y1; }
};

struct WindowSpec {
  WindowShape shape = WindowShape::Square;
  int side = 3;
  OffsetRect rect;

  std::vector<std::pair<int, int>> mask() const {
    std::vector<std::pair<int, int>> m;
    m.reserve(static_cast<size_t>(rect.count()));
    for (int n = rect.y0; n <= rect.y1; ++n)
      for (int mm = rect.x0; mm <= rect.x1; ++mm) m.emplace_back(mm, n);
    return m;
  }
};

inline WindowSpec make_window(WindowShape shape, int side) {
  if (side < kMinWindowSide || side > kMaxWindowSide || side % 2 == 0)
    throw BadSide("window side must be odd and in [3,15]");
  const int h = (side - 1) / 2;
  const auto [dx, dy] = shape_direction(shape);
  WindowSpec w;
  w.shape = shape;
  w.side = side;
  w.rect.x0 = (dx > 0) ? 0 : -h;
  w.rect.x1 = (dx < 0) ? 0 : h;
  w.rect.y0 = (dy > 0) ? 0 : -h;
  w.rect.y1 = (dy < 0) ? 0 : h;
  return w;
}

// The nine preset shapes at one side length, square first.
inline std::vector<WindowSpec> shape_dictionary(int side) {
  std::vector<WindowSpec> dict;
  dict.reserve(kShapeCount);
  for (int s = 0; s < kShapeCount; ++s)
    dict.push_back(make_window(static_cast<WindowShape>(s), side));
  return dict;
}

// Set of viewpoints from which every pixel of a window of the given shape
// stays visible. A window opens away from its occluder, and the occluder
// hides the window pixels exactly in the viewpoints it shifts across, so the
// visible half of the angular grid lies opposite the opening direction:
// viewpoints with delta_u * dx <= 0 and delta_v * dy <= 0. The square keeps
// the full grid, and the central viewpoint is always a member.
struct ViewpointSet {
  WindowShape shape = WindowShape::Square;
  std::vector<std::pair<int, int>> indices;

  size_t size() const { return indices.size(); }
};

// A selected window together with the viewpoints it will be matched under
// and the matching entropy it scored.
struct WindowChoice {
  WindowSpec window;
  ViewpointSet viewpoints;
  double entropy = 0.0;
};

inline ViewpointSet visible_viewpoints(WindowShape shape, int angular_u,
                                       int angular_v) {
  const int uc = (angular_u - 1) / 2;
  const int vc = (angular_v - 1) / 2;
  const auto [dx, dy] = shape_direction(shape);
  ViewpointSet set;
  set.shape = shape;
  set.indices.reserve(static_cast<size_t>(angular_u) * angular_v);
  for (int v = 0; v < angular_v; ++v) {
    for (int u = 0; u < angular_u; ++u) {
      const int du = u - uc;
      const int dv = v - vc;
      if (du * dx <= 0 && dv * dy <= 0) set.indices.emplace_back(u, v);
    }
  }
  return set;
}

}  // namespace lfdisp
