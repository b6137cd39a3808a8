#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "lfdisp/errors.hpp"
#include "lfdisp/image.hpp"
#include "lfdisp/lightfield.hpp"
#include "lfdisp/matcher.hpp"

namespace lfdisp {

// Region indicator labels; the four sets partition the image.
enum class Region : uint8_t {
  Occluding = 0,
  Occluded = 1,
  Texture = 2,
  Smooth = 3,
};

using RegionMap = Grid<Region>;

// Per-view layer segmentation; a larger value means a nearer layer.
using SegMap = Grid<float>;

// The central viewpoint plus the farthest viewpoint in each of eight
// directions - the set used for occlusion indication and the initial
// disparity.
struct IndicatorViewpoints {
  std::vector<std::pair<int, int>> indices;

  size_t size() const { return indices.size(); }
};

inline IndicatorViewpoints make_indicator_viewpoints(int angular_u,
                                                     int angular_v) {
  return {detail::indicator_indices(angular_u, angular_v)};
}

// How the per-viewpoint segmentation lookup position is shifted.
enum class DiffShift : uint8_t {
  None,            // compare segmentations at identical raster coordinates
  InitDisparity,   // shift by (delta_u, delta_v) * init_disp(x,y)
  ViewpointUnits,  // shift by (delta_u, delta_v) in raw index units
};

struct RegionParams {
  int layers = 4;                    // L for the disparity-layer segmentation
  int seg_window_side = 7;           // block-matching window per view
  double min_layer_separation = 0.2; // merge Otsu classes closer than this
  double min_init_valid_fraction = 0.5;
  DiffShift diff_shift = DiffShift::None;
  int psi_radius = 2;                // neighborhood radius for the smoothness count
  double intensity_tol = 0.02;       // gray difference regarded as "different"
};

namespace detail {

// Multi-level Otsu thresholds over the valid disparity values, followed by a
// merge of classes whose means sit closer than min_separation (tight
// disparity modes would otherwise be split into spurious layers).
inline std::vector<double> otsu_thresholds(const std::vector<float>& values,
                                           int layers,
                                           double min_separation) {
  std::vector<double> thresholds;
  if (values.empty() || layers <= 1) return thresholds;

  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double vmin = *mn_it, vmax = *mx_it;
  if (!(vmax > vmin)) return thresholds;

  constexpr int kBins = 64;
  const double bin_w = (vmax - vmin) / kBins;
  std::vector<double> count(kBins, 0.0), wsum(kBins, 0.0);
  for (float v : values) {
    int b = static_cast<int>((v - vmin) / bin_w);
    if (b >= kBins) b = kBins - 1;
    count[b] += 1.0;
    wsum[b] += v;
  }
  std::vector<double> ccount(kBins + 1, 0.0), cwsum(kBins + 1, 0.0);
  for (int b = 0; b < kBins; ++b) {
    ccount[b + 1] = ccount[b] + count[b];
    cwsum[b + 1] = cwsum[b] + wsum[b];
  }
  auto class_score = [&](int b0, int b1) {  // bins [b0, b1)
    const double w = ccount[b1] - ccount[b0];
    if (w <= 0.0) return 0.0;
    const double s = cwsum[b1] - cwsum[b0];
    return s * s / w;
  };

  // Exhaustive search over cut positions; L is small so this stays cheap.
  const int cuts = layers - 1;
  std::vector<int> cur(cuts), best(cuts);
  double best_score = -1.0;
  auto recurse = [&](auto&& self, int k, int from, double acc) -> void {
    if (k == cuts) {
      const double score = acc + class_score(k == 0 ? 0 : cur[k - 1], kBins);
      if (score > best_score) {
        best_score = score;
        best = cur;
      }
      return;
    }
    for (int c = from; c <= kBins - (cuts - k); ++c) {
      cur[k] = c;
      self(self, k + 1, c + 1, acc + class_score(k == 0 ? 0 : cur[k - 1], c));
    }
  };
  recurse(recurse, 0, 1, 0.0);

  std::vector<int> cut_bins(best.begin(), best.end());
  auto class_mean = [&](int b0, int b1) {
    const double w = ccount[b1] - ccount[b0];
    return w > 0.0 ? (cwsum[b1] - cwsum[b0]) / w : 0.0;
  };

  // Merge adjacent classes with nearly equal means.
  bool merged = true;
  while (merged && !cut_bins.empty()) {
    merged = false;
    double min_gap = std::numeric_limits<double>::infinity();
    int min_j = -1;
    for (size_t j = 0; j < cut_bins.size(); ++j) {
      const int lo = (j == 0) ? 0 : cut_bins[j - 1];
      const int hi = (j + 1 == cut_bins.size()) ? kBins : cut_bins[j + 1];
      const double gap =
          class_mean(cut_bins[j], hi) - class_mean(lo, cut_bins[j]);
      if (gap < min_gap) {
        min_gap = gap;
        min_j = static_cast<int>(j);
      }
    }
    if (min_j >= 0 && min_gap < min_separation) {
      cut_bins.erase(cut_bins.begin() + min_j);
      merged = true;
    }
  }

  thresholds.reserve(cut_bins.size());
  for (int c : cut_bins) thresholds.push_back(vmin + c * bin_w);
  return thresholds;
}

// Fills invalid pixels from the nearest valid pixel in the same row, then
// the same column; anything still unset becomes the map's first layer.
inline Grid<float> fill_invalid(const DisparityMap& map) {
  const int w = map.width(), h = map.height();
  Grid<float> out(w, h, 0.0f);
  Grid<uint8_t> done(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (map.valid.at(x, y)) {
        out.at(x, y) = map.values.at(x, y);
        done.at(x, y) = 1;
        continue;
      }
      int best_dist = std::numeric_limits<int>::max();
      float best_val = 0.0f;
      for (int xl = x - 1; xl >= 0; --xl) {
        if (map.valid.at(xl, y)) {
          best_dist = x - xl;
          best_val = map.values.at(xl, y);
          break;
        }
      }
      for (int xr = x + 1; xr < w; ++xr) {
        if (map.valid.at(xr, y)) {
          if (xr - x < best_dist) {
            best_dist = xr - x;
            best_val = map.values.at(xr, y);
          }
          break;
        }
      }
      if (best_dist != std::numeric_limits<int>::max()) {
        out.at(x, y) = best_val;
        done.at(x, y) = 1;
      }
    }
  }
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      if (done.at(x, y)) continue;
      int best_dist = std::numeric_limits<int>::max();
      float best_val = 0.0f;
      for (int yu = y - 1; yu >= 0; --yu) {
        if (done.at(x, yu)) {
          best_dist = y - yu;
          best_val = out.at(x, yu);
          break;
        }
      }
      for (int yd = y + 1; yd < h; ++yd) {
        if (done.at(x, yd)) {
          if (yd - y < best_dist) best_val = out.at(x, yd);
          break;
        }
      }
      out.at(x, y) = best_val;
    }
  }
  return out;
}

inline SegMap layers_from_disparity(const Grid<float>& disp,
                                    const std::vector<double>& thresholds) {
  SegMap seg(disp.width(), disp.height(), 0.0f);
  for (int y = 0; y < disp.height(); ++y) {
    for (int x = 0; x < disp.width(); ++x) {
      const double v = disp.at(x, y);
      int layer = 0;
      for (double t : thresholds)
        if (v >= t) ++layer;
      seg.at(x, y) = static_cast<float>(layer);
    }
  }
  return seg;
}

}  // namespace detail

using SegMapSet = std::map<std::pair<int, int>, SegMap>;

// Disparity-layer segmentation of the indicator views: per view a coarse
// block-matching disparity, thresholded into layers whose cuts come from a
// multi-level Otsu of the central view's initial disparity. Layer values
// grow with disparity, so nearer objects get larger labels in every view.
inline SegMapSet segment_views(const LightField& lf,
                               const DisparityMap& init_disp,
                               const IndicatorViewpoints& viewpoints,
                               int layers, const DisparityGrid& coarse_grid,
                               const RegionParams& params = {}) {
  if (layers < 1 || layers > 6)
    throw BadConfig("layer count must be in [1,6]");
  const size_t need = static_cast<size_t>(
      params.min_init_valid_fraction * init_disp.values.size());
  if (init_disp.valid_count() < need)
    throw InsufficientInitialDisparity(
        "initial disparity valid on too few pixels");

  std::vector<float> valid_values;
  valid_values.reserve(init_disp.valid_count());
  for (int y = 0; y < init_disp.height(); ++y)
    for (int x = 0; x < init_disp.width(); ++x)
      if (init_disp.valid.at(x, y))
        valid_values.push_back(init_disp.values.at(x, y));
  const std::vector<double> thresholds = detail::otsu_thresholds(
      valid_values, layers, params.min_layer_separation);

  const auto partners =
      detail::indicator_indices(lf.angular_u, lf.angular_v);
  SegMapSet segs;
  for (const auto& [u, v] : viewpoints.indices) {
    DisparityMap view_disp;
    if (u == lf.center_u() && v == lf.center_v()) {
      view_disp = init_disp;
    } else {
      view_disp = block_matching_disparity(lf, u, v, partners,
                                           params.seg_window_side, coarse_grid);
    }
    segs.emplace(std::make_pair(u, v),
                 detail::layers_from_disparity(detail::fill_invalid(view_disp),
                                               thresholds));
  }
  return segs;
}

// Sum over the indicator views of (central segmentation - view segmentation)
// sampled at the per-view lookup position. Out-of-bounds lookups contribute
// nothing. Positive values flag occluding pixels, negative values occluded
// ones.
inline Grid<float> segmentation_diff(const SegMapSet& segs,
                                     const SegMap& center_seg, int center_u,
                                     int center_v,
                                     const DisparityMap& init_disp,
                                     DiffShift shift = DiffShift::None) {
  const int w = center_seg.width(), h = center_seg.height();
  for (const auto& [vp, seg] : segs)
    if (!seg.same_shape(center_seg))
      throw ShapeMismatch("segmentation shapes differ");
  if (!init_disp.values.same_shape(center_seg))
    throw ShapeMismatch("initial disparity shape differs from segmentations");

  Grid<float> diff(w, h, 0.0f);
  for (const auto& [vp, seg] : segs) {
    const int du = vp.first - center_u;
    const int dv = vp.second - center_v;
    if (du == 0 && dv == 0) continue;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double sx = x, sy = y;
        switch (shift) {
          case DiffShift::None:
            break;
          case DiffShift::InitDisparity: {
            if (!init_disp.valid.at(x, y)) continue;
            const double d0 = init_disp.values.at(x, y);
            sx = x + du * d0;
            sy = y + dv * d0;
            break;
          }
          case DiffShift::ViewpointUnits:
            sx = x + du;
            sy = y + dv;
            break;
        }
        const int xi = static_cast<int>(std::lround(sx));
        const int yi = static_cast<int>(std::lround(sy));
        if (!seg.in_bounds(xi, yi)) continue;
        diff.at(x, y) += center_seg.at(x, y) - seg.at(xi, yi);
      }
    }
  }
  return diff;
}

// Assigns the four region labels in priority order: occluded, occluding,
// smooth, texture. psi counts neighbors whose gray differs by more than
// intensity_tol; a pixel is smooth when psi < N/2 with N the nominal
// neighbor count (2r+1)^2 - 1.
inline RegionMap classify_regions(const Grid<float>& diff,
                                  const Image& center_view, int radius = 2,
                                  double intensity_tol = 0.02) {
  if (!diff.same_shape(center_view))
    throw ShapeMismatch("diff and center view shapes differ");
  const int w = diff.width(), h = diff.height();
  const int nominal = (2 * radius + 1) * (2 * radius + 1) - 1;
  const double tau = nominal / 2.0;

  RegionMap regions(w, h, Region::Texture);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float d = diff.at(x, y);
      if (d < 0.0f) {
        regions.at(x, y) = Region::Occluded;
        continue;
      }
      if (d > 0.0f) {
        regions.at(x, y) = Region::Occluding;
        continue;
      }
      const double c = center_view.at(x, y);
      int psi = 0;
      for (int n = -radius; n <= radius; ++n) {
        for (int m = -radius; m <= radius; ++m) {
          if (m == 0 && n == 0) continue;
          if (!center_view.in_bounds(x + m, y + n)) continue;
          if (std::abs(center_view.at(x + m, y + n) - c) > intensity_tol)
            ++psi;
        }
      }
      regions.at(x, y) = (psi < tau) ? Region::Smooth : Region::Texture;
    }
  }
  return regions;
}

struct RegionsResult {
  RegionMap map;
  Grid<float> diff;
  SegMapSet segs;
};

// Full region identification stage: segment the indicator views, difference
// them against the central segmentation and classify.
inline RegionsResult identify_regions(const LightField& lf,
                                      const DisparityMap& init_disp,
                                      const DisparityGrid& coarse_grid,
                                      const RegionParams& params = {}) {
  const IndicatorViewpoints vps =
      make_indicator_viewpoints(lf.angular_u, lf.angular_v);
  RegionsResult r;
  r.segs = segment_views(lf, init_disp, vps, params.layers, coarse_grid,
                         params);
  const SegMap& center = r.segs.at({lf.center_u(), lf.center_v()});
  r.diff = segmentation_diff(r.segs, center, lf.center_u(), lf.center_v(),
                             init_disp, params.diff_shift);
  r.map = classify_regions(r.diff, central_view(lf), params.psi_radius,
                           params.intensity_tol);
  return r;
}

}  // namespace lfdisp
