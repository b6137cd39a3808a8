#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "lfdisp/errors.hpp"
#include "lfdisp/geometry.hpp"
#include "lfdisp/image.hpp"
#include "lfdisp/lightfield.hpp"
#include "lfdisp/window.hpp"

namespace lfdisp {

// Discretization of the disparity line search.
struct DisparityGrid {
  double d_min = 0.0;
  double d_max = 0.0;
  double step = 0.05;

  static DisparityGrid make(double d_min, double d_max, double step) {
    if (!(step > 0.0) || !(d_min <= d_max))
      throw BadConfig("disparity grid needs d_min <= d_max and step > 0");
    return {d_min, d_max, step};
  }

  int size() const {
    return static_cast<int>(std::floor((d_max - d_min) / step + 1e-9)) + 1;
  }
  double sample(int i) const { return d_min + i * step; }
};

enum class CostMetric : uint8_t { L1, L2 };

struct MatchParams {
  // Divide by the number of contributing viewpoints so costs stay comparable
  // between full and reduced viewpoint sets.
  bool normalize_by_viewpoints = true;
  CostMetric metric = CostMetric::L1;
};

struct CostSample {
  double cost = 0.0;
  double valid_fraction = 0.0;
};

// Matching cost of one window at one disparity: mean absolute (or squared)
// difference between the central-view window and its reprojection into every
// other viewpoint of the set. Out-of-bounds samples are dropped and the sum
// rescaled, never clamped.
inline CostSample matching_cost(const LightField& lf, int anchor_x,
                                int anchor_y, double disp,
                                const WindowChoice& choice,
                                const Calibration& cal,
                                const MatchParams& params = {}) {
  const Image& center = central_view(lf);
  const OffsetRect rect =
      choice.window.rect.clipped(anchor_x, anchor_y, lf.width, lf.height);
  if (!rect.valid()) throw NoValidSamples("window clipped to nothing");
  const int mask_count = rect.count();

  int n_views = 0;
  double acc = 0.0;
  int64_t retained = 0;
  for (const auto& [u, v] : choice.viewpoints.indices) {
    if (u == lf.center_u() && v == lf.center_v()) continue;
    ++n_views;
    const auto [bx, by] = reproject(anchor_x, anchor_y, disp, u, v, cal);
    const Image& view = lf.view(u, v);
    for (int n = rect.y0; n <= rect.y1; ++n) {
      for (int m = rect.x0; m <= rect.x1; ++m) {
        const auto s = sample_bilinear(view, bx + m, by + n);
        if (!s) continue;
        const double diff = double(center.at(anchor_x + m, anchor_y + n)) - *s;
        acc += params.metric == CostMetric::L1 ? std::abs(diff) : diff * diff;
        ++retained;
      }
    }
  }

  const int64_t total = int64_t(mask_count) * n_views;
  if (total == 0) return {0.0, 1.0};  // only the central viewpoint
  if (retained == 0) throw NoValidSamples("all samples out of bounds");

  double cost = acc * (double(total) / double(retained)) / mask_count;
  if (params.normalize_by_viewpoints) cost /= n_views;
  return {cost, double(retained) / double(total)};
}

struct CostCurve {
  std::vector<double> cost;
  std::vector<double> valid_fraction;
  std::vector<uint8_t> valid;

  int size() const { return static_cast<int>(cost.size()); }
};

inline CostCurve cost_curve(const LightField& lf, int anchor_x, int anchor_y,
                            const WindowChoice& choice,
                            const DisparityGrid& grid, const Calibration& cal,
                            const MatchParams& params = {}) {
  const int n = grid.size();
  CostCurve curve;
  curve.cost.assign(n, std::numeric_limits<double>::quiet_NaN());
  curve.valid_fraction.assign(n, 0.0);
  curve.valid.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    try {
      const CostSample s =
          matching_cost(lf, anchor_x, anchor_y, grid.sample(i), choice, cal,
                        params);
      curve.cost[i] = s.cost;
      curve.valid_fraction[i] = s.valid_fraction;
      curve.valid[i] = 1;
    } catch (const NoValidSamples&) {
      // sample stays invalid, not fatal
    }
  }
  return curve;
}

namespace detail {

// Parabola vertex through three consecutive cost samples around the discrete
// minimum, clamped to one grid step.
inline double parabola_vertex(double d_star, double step, double c_prev,
                              double c_min, double c_next) {
  const double denom = c_prev - 2.0 * c_min + c_next;
  if (!(denom > 0.0)) return d_star;
  double offset = 0.5 * step * (c_prev - c_next) / denom;
  if (offset > step) offset = step;
  if (offset < -step) offset = -step;
  return d_star + offset;
}

}  // namespace detail

// Sub-step refinement of a sampled cost curve. Falls back to the discrete
// argmin when the minimum has no valid 3-sample neighborhood.
inline double subpixel_refine(const CostCurve& curve,
                              const DisparityGrid& grid) {
  int best = -1;
  for (int i = 0; i < curve.size(); ++i) {
    if (!curve.valid[i]) continue;
    if (best < 0 || curve.cost[i] < curve.cost[best]) best = i;
  }
  if (best < 0) throw NoValidSamples("cost curve has no valid samples");
  const double d_star = grid.sample(best);
  if (best == 0 || best == curve.size() - 1) return d_star;
  if (!curve.valid[best - 1] || !curve.valid[best + 1]) return d_star;
  return detail::parabola_vertex(d_star, grid.step, curve.cost[best - 1],
                                 curve.cost[best], curve.cost[best + 1]);
}

namespace detail {

// Summed-area table over doubles; rect() returns the inclusive-rectangle sum.
class Sat {
 public:
  void build(const Grid<float>& img) {
    w_ = img.width();
    h_ = img.height();
    s_.assign(size_t(w_ + 1) * (h_ + 1), 0.0);
    for (int y = 0; y < h_; ++y) {
      const float* src = img.row(y);
      double rowsum = 0.0;
      const double* above = s_.data() + size_t(y) * (w_ + 1);
      double* cur = s_.data() + size_t(y + 1) * (w_ + 1);
      for (int x = 0; x < w_; ++x) {
        rowsum += src[x];
        cur[x + 1] = above[x + 1] + rowsum;
      }
    }
  }

  double rect(int x0, int y0, int x1, int y1) const {
    const size_t stride = size_t(w_ + 1);
    return s_[size_t(y1 + 1) * stride + (x1 + 1)] -
           s_[size_t(y0) * stride + (x1 + 1)] -
           s_[size_t(y1 + 1) * stride + x0] + s_[size_t(y0) * stride + x0];
  }

 private:
  int w_ = 0, h_ = 0;
  std::vector<double> s_;
};

// Per-pixel absolute (or squared) difference between a reference view and a
// partner view shifted by (sx, sy), with a validity mask for samples that
// leave the partner image.
inline void warp_difference(const Image& ref, const Image& partner, double sx,
                            double sy, CostMetric metric, Grid<float>& ad,
                            Grid<uint8_t>& valid) {
  const int w = ref.width(), h = ref.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const float* r = ref.row(y);
    float* a = ad.row(y);
    uint8_t* va = valid.row(y);
    for (int x = 0; x < w; ++x) {
      const auto s = sample_bilinear(partner, x + sx, y + sy);
      if (s) {
        const double diff = double(r[x]) - *s;
        a[x] = static_cast<float>(metric == CostMetric::L1 ? std::abs(diff)
                                                           : diff * diff);
        va[x] = 1;
      } else {
        a[x] = 0.0f;
        va[x] = 0;
      }
    }
  }
}

// Central viewpoint plus the farthest viewpoint in each of eight directions.
inline std::vector<std::pair<int, int>> indicator_indices(int angular_u,
                                                          int angular_v) {
  const int uc = (angular_u - 1) / 2;
  const int vc = (angular_v - 1) / 2;
  const int ue = angular_u - 1;
  const int ve = angular_v - 1;
  const std::pair<int, int> raw[9] = {
      {uc, vc}, {0, vc}, {ue, vc}, {uc, 0}, {uc, ve},
      {0, 0},   {ue, 0}, {0, ve},  {ue, ve}};
  std::vector<std::pair<int, int>> out;
  for (const auto& p : raw)
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  return out;
}

}  // namespace detail

// Block-matching disparity of one reference view against a fixed partner
// set, square window, shared cost-volume evaluation. Pixels whose cost curve
// is flat within flat_tol are marked invalid.
inline DisparityMap block_matching_disparity(
    const LightField& lf, int ref_u, int ref_v,
    const std::vector<std::pair<int, int>>& partners, int window_side,
    const DisparityGrid& grid, double flat_tol = 1e-4,
    const MatchParams& params = {}) {
  const Image& ref = lf.view(ref_u, ref_v);
  const int w = lf.width, h = lf.height;
  const int half = (window_side - 1) / 2;
  const int n = grid.size();

  std::vector<double> best_cost(size_t(w) * h,
                                std::numeric_limits<double>::infinity());
  std::vector<double> min_cost(size_t(w) * h,
                               std::numeric_limits<double>::infinity());
  std::vector<double> max_cost(size_t(w) * h,
                               -std::numeric_limits<double>::infinity());
  std::vector<int> best_idx(size_t(w) * h, -1);

  Grid<float> ad(w, h), ad_total(w, h);
  Grid<uint8_t> valid(w, h);
  Grid<float> cnt_total(w, h);
  detail::Sat sat_ad, sat_cnt;

  for (int i = 0; i < n; ++i) {
    const double d = grid.sample(i);
    std::fill(ad_total.data().begin(), ad_total.data().end(), 0.0f);
    std::fill(cnt_total.data().begin(), cnt_total.data().end(), 0.0f);
    for (const auto& [u, v] : partners) {
      if (u == ref_u && v == ref_v) continue;
      detail::warp_difference(ref, lf.view(u, v), (u - ref_u) * d,
                              (v - ref_v) * d, params.metric, ad, valid);
#pragma omp parallel for schedule(static)
      for (int y = 0; y < h; ++y) {
        const float* a = ad.row(y);
        const uint8_t* va = valid.row(y);
        float* at = ad_total.row(y);
        float* ct = cnt_total.row(y);
        for (int x = 0; x < w; ++x) {
          if (va[x]) {
            at[x] += a[x];
            ct[x] += 1.0f;
          }
        }
      }
    }
    sat_ad.build(ad_total);
    sat_cnt.build(cnt_total);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
      const int y0 = std::max(0, y - half);
      const int y1 = std::min(h - 1, y + half);
      for (int x = 0; x < w; ++x) {
        const int x0 = std::max(0, x - half);
        const int x1 = std::min(w - 1, x + half);
        const double cnt = sat_cnt.rect(x0, y0, x1, y1);
        if (cnt <= 0.0) continue;
        const double cost = sat_ad.rect(x0, y0, x1, y1) / cnt;
        const size_t p = size_t(y) * w + x;
        if (cost < best_cost[p]) {
          best_cost[p] = cost;
          best_idx[p] = i;
        }
        min_cost[p] = std::min(min_cost[p], cost);
        max_cost[p] = std::max(max_cost[p], cost);
      }
    }
  }

  DisparityMap map(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t p = size_t(y) * w + x;
      if (best_idx[p] < 0) continue;
      if (max_cost[p] - min_cost[p] < flat_tol) continue;  // black hole
      map.values.at(x, y) = static_cast<float>(grid.sample(best_idx[p]));
      map.valid.at(x, y) = 1;
    }
  }
  return map;
}

// Initial disparity of the central view: fixed 7x7 square window matched
// over the nine indicator viewpoints on the coarse grid.
inline DisparityMap initial_disparity(const LightField& lf,
                                      const Calibration& cal,
                                      const DisparityGrid& grid,
                                      int window_side = 7,
                                      double flat_tol = 1e-4,
                                      const MatchParams& params = {}) {
  (void)cal;  // the angular center is implied by the light field itself
  return block_matching_disparity(
      lf, lf.center_u(), lf.center_v(),
      detail::indicator_indices(lf.angular_u, lf.angular_v), window_side, grid,
      flat_tol, params);
}

}  // namespace lfdisp
