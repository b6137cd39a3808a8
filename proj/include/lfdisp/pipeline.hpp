#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "lfdisp/matcher.hpp"
#include "lfdisp/region.hpp"
#include "lfdisp/select.hpp"

namespace lfdisp {

struct EstimatorConfig {
  double coarse_step = 0.1;   // initial disparity search step
  double fine_step = 0.05;    // final line-search step
  double flat_tol = 1e-4;     // cost-curve spread below this marks a black hole
  int init_window_side = 7;
  double lambda = 1.0;  // entropy weight of the optimization model; the
                        // two-step solver never trades it against the cost
  SelectParams select;
  MatchParams match;
  RegionParams region;
  bool adaptive = true;  // false = fixed square window, full viewpoints
  int fixed_side = 9;
};

struct EstimateResult {
  DisparityMap disparity;  // per-pixel line-search estimate, before TV
  DisparityMap argmin;     // discrete line-search minimum, no sub-step refinement
  RegionMap regions;
  DisparityMap initial;
};

namespace detail {

inline bool set_contains_view(WindowShape kind, int du, int dv) {
  const auto [dx, dy] = shape_direction(kind);
  return du * dx <= 0 && dv * dy <= 0;
}

}  // namespace detail

// Full two-step estimation: initial disparity, region identification,
// per-pixel window/viewpoint selection, then a line search over the fine
// grid with parabolic sub-step refinement. All windows are rectangles, so
// the per-disparity costs come from shared warped-difference images and
// summed-area tables; results are identical to evaluating matching_cost
// pixel by pixel.
inline EstimateResult estimate_disparity(const LightField& lf,
                                         const SceneConfig& scene,
                                         const EstimatorConfig& cfg = {}) {
  const int w = lf.width, h = lf.height;
  const size_t n_px = size_t(w) * h;
  const int uc = lf.center_u(), vc = lf.center_v();

  const DisparityGrid coarse = DisparityGrid::make(
      scene.disparity_min, scene.disparity_max, cfg.coarse_step);
  const DisparityGrid fine = DisparityGrid::make(
      scene.disparity_min, scene.disparity_max, cfg.fine_step);
  const Calibration cal =
      calibration_for(lf, scene.focus_distance, scene.baseline_step);

  EstimateResult result;
  result.initial = initial_disparity(lf, cal, coarse, cfg.init_window_side,
                                     cfg.flat_tol, cfg.match);

  // Region identification needs a usable initial disparity; a textureless
  // scene yields almost none, in which case occlusion indication degenerates
  // to a zero diff and only the smoothness test remains.
  if (cfg.adaptive) {
    const double valid_frac =
        double(result.initial.valid_count()) / double(n_px);
    if (valid_frac >= cfg.region.min_init_valid_fraction) {
      result.regions =
          identify_regions(lf, result.initial, coarse, cfg.region).map;
    } else {
      result.regions = classify_regions(Grid<float>(w, h, 0.0f),
                                        central_view(lf), cfg.region.psi_radius,
                                        cfg.region.intensity_tol);
    }
  } else {
    result.regions = RegionMap(w, h, Region::Texture);
  }

  // Per-pixel window choice: the clipped offset rectangle and the viewpoint
  // set it is matched under.
  std::vector<OffsetRect> px_rect(n_px);
  std::vector<uint8_t> px_vp(n_px, uint8_t(WindowShape::Square));
  if (cfg.adaptive) {
#pragma omp parallel for schedule(dynamic, 4)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const WindowChoice choice = select_window(lf, result.initial,
                                                  result.regions, x, y,
                                                  cfg.select);
        const size_t p = size_t(y) * w + x;
        px_rect[p] = choice.window.rect;
        px_vp[p] = uint8_t(choice.viewpoints.shape);
      }
    }
  } else {
    const WindowSpec fixed = make_window(WindowShape::Square, cfg.fixed_side);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        px_rect[size_t(y) * w + x] = fixed.rect.clipped(x, y, w, h);
  }

  bool kind_used[kShapeCount] = {false};
  for (size_t p = 0; p < n_px; ++p) kind_used[px_vp[p]] = true;
  int kind_views[kShapeCount] = {0};  // contributing views, center excluded
  for (int k = 0; k < kShapeCount; ++k) {
    if (!kind_used[k]) continue;
    for (int v = 0; v < lf.angular_v; ++v)
      for (int u = 0; u < lf.angular_u; ++u)
        if (!(u == uc && v == vc) &&
            detail::set_contains_view(WindowShape(k), u - uc, v - vc))
          ++kind_views[k];
  }

  // Streaming line-search state per pixel.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> best_i(n_px, -1);
  std::vector<double> best_c(n_px, kInf), c_before(n_px, kNan),
      c_after(n_px, kNan), prev_c(n_px, kNan), min_c(n_px, kInf),
      max_c(n_px, -kInf);
  std::vector<uint8_t> prev_ok(n_px, 0);

  const Image& center = central_view(lf);
  Grid<float> ad(w, h);
  Grid<uint8_t> valid(w, h);
  Grid<float> ads[kShapeCount];
  Grid<float> cnts[kShapeCount];
  detail::Sat sat_ad[kShapeCount], sat_cnt[kShapeCount];
  for (int k = 0; k < kShapeCount; ++k) {
    if (!kind_used[k]) continue;
    ads[k] = Grid<float>(w, h);
    cnts[k] = Grid<float>(w, h);
  }

  const int n_samples = fine.size();
  for (int i = 0; i < n_samples; ++i) {
    const double d = fine.sample(i);
    for (int k = 0; k < kShapeCount; ++k) {
      if (!kind_used[k]) continue;
      std::fill(ads[k].data().begin(), ads[k].data().end(), 0.0f);
      std::fill(cnts[k].data().begin(), cnts[k].data().end(), 0.0f);
    }
    for (int vv = 0; vv < lf.angular_v; ++vv) {
      for (int uu = 0; uu < lf.angular_u; ++uu) {
        if (uu == uc && vv == vc) continue;
        const int du = uu - uc, dv = vv - vc;
        bool needed = false;
        for (int k = 0; k < kShapeCount && !needed; ++k)
          needed = kind_used[k] &&
                   detail::set_contains_view(WindowShape(k), du, dv);
        if (!needed) continue;
        detail::warp_difference(center, lf.view(uu, vv), du * d, dv * d,
                                cfg.match.metric, ad, valid);
        for (int k = 0; k < kShapeCount; ++k) {
          if (!kind_used[k] ||
              !detail::set_contains_view(WindowShape(k), du, dv))
            continue;
#pragma omp parallel for schedule(static)
          for (int y = 0; y < h; ++y) {
            const float* a = ad.row(y);
            const uint8_t* va = valid.row(y);
            float* at = ads[k].row(y);
            float* ct = cnts[k].row(y);
            for (int x = 0; x < w; ++x) {
              if (va[x]) {
                at[x] += a[x];
                ct[x] += 1.0f;
              }
            }
          }
        }
      }
    }
    for (int k = 0; k < kShapeCount; ++k) {
      if (!kind_used[k]) continue;
      sat_ad[k].build(ads[k]);
      sat_cnt[k].build(cnts[k]);
    }

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const size_t p = size_t(y) * w + x;
        const int k = px_vp[p];
        const OffsetRect& rect = px_rect[p];
        const double cnt = sat_cnt[k].rect(x + rect.x0, y + rect.y0,
                                           x + rect.x1, y + rect.y1);
        if (cnt <= 0.0) {
          prev_ok[p] = 0;
          continue;
        }
        double cost = sat_ad[k].rect(x + rect.x0, y + rect.y0, x + rect.x1,
                                     y + rect.y1) /
                      cnt;
        if (!cfg.match.normalize_by_viewpoints) cost *= kind_views[k];
        if (cost < best_c[p]) {
          best_c[p] = cost;
          best_i[p] = i;
          c_before[p] = prev_ok[p] ? prev_c[p] : kNan;
          c_after[p] = kNan;
        } else if (best_i[p] == i - 1) {
          c_after[p] = cost;
        }
        min_c[p] = std::min(min_c[p], cost);
        max_c[p] = std::max(max_c[p], cost);
        prev_c[p] = cost;
        prev_ok[p] = 1;
      }
    }
  }

  result.disparity = DisparityMap(w, h);
  result.argmin = DisparityMap(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t p = size_t(y) * w + x;
      if (best_i[p] < 0) continue;
      if (max_c[p] - min_c[p] < cfg.flat_tol) continue;  // black hole
      double d = fine.sample(best_i[p]);
      result.argmin.values.at(x, y) = static_cast<float>(d);
      result.argmin.valid.at(x, y) = 1;
      if (best_i[p] > 0 && best_i[p] < n_samples - 1 &&
          std::isfinite(c_before[p]) && std::isfinite(c_after[p])) {
        d = detail::parabola_vertex(d, fine.step, c_before[p], best_c[p],
                                    c_after[p]);
      }
      result.disparity.values.at(x, y) = static_cast<float>(d);
      result.disparity.valid.at(x, y) = 1;
    }
  }
  return result;
}

}  // namespace lfdisp
