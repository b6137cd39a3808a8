#pragma once

#include <vector>

#include "lfdisp/entropy.hpp"
#include "lfdisp/region.hpp"
#include "lfdisp/window.hpp"

namespace lfdisp {

struct SelectParams {
  double alpha1 = 1.0;
  double alpha2 = 1.0;  // applied only in occlusion regions
  int gray_bins = 32;
  double disparity_bin_width = 0.1;  // one coarse search step
  int min_side = kMinWindowSide;
  int max_side = kMaxWindowSide;
};

struct WindowCandidate {
  WindowShape shape = WindowShape::Square;
  int side = 3;
  double entropy = 0.0;
  bool evaluated = false;  // false when clipping left fewer than 3 pixels
};

namespace detail {

inline double candidate_entropy(const Image& center,
                                const DisparityMap& init_disp,
                                const RegionMap& regions, int ax, int ay,
                                const OffsetRect& rect, Region mismatch_label,
                                bool use_mismatch,
                                const EntropyParams& eparams,
                                std::vector<WindowPixel>& scratch) {
  scratch.clear();
  for (int n = rect.y0; n <= rect.y1; ++n) {
    for (int m = rect.x0; m <= rect.x1; ++m) {
      const int x = ax + m, y = ay + n;
      WindowPixel p;
      p.gray = center.at(x, y);
      if (init_disp.valid.at(x, y)) p.init_disp = init_disp.values.at(x, y);
      p.mismatched = use_mismatch && regions.at(x, y) == mismatch_label;
      scratch.push_back(p);
    }
  }
  return matching_entropy(scratch, eparams);
}

}  // namespace detail

// Entropy of every candidate window at one anchor: squares only in textured
// and smooth regions, all nine shapes in occlusion regions. Candidates whose
// clipped mask keeps fewer than 3 pixels are skipped.
inline std::vector<WindowCandidate> candidate_entropies(
    const LightField& lf, const DisparityMap& init_disp,
    const RegionMap& regions, int ax, int ay, const SelectParams& params) {
  const Image& center = central_view(lf);
  const Region label = regions.at(ax, ay);
  const bool occlusion =
      label == Region::Occluding || label == Region::Occluded;

  EntropyParams eparams;
  eparams.alpha1 = params.alpha1;
  eparams.alpha2 = occlusion ? params.alpha2 : 0.0;
  eparams.gray_bins = params.gray_bins;
  eparams.disparity_bin_width = params.disparity_bin_width;

  const Region mismatch_label =
      label == Region::Occluding ? Region::Occluded : Region::Occluding;

  std::vector<WindowCandidate> table;
  std::vector<WindowPixel> scratch;
  scratch.reserve(size_t(params.max_side) * params.max_side);
  for (int side = params.min_side; side <= params.max_side; side += 2) {
    const int shape_count = occlusion ? kShapeCount : 1;
    for (int s = 0; s < shape_count; ++s) {
      WindowCandidate cand;
      cand.shape = static_cast<WindowShape>(s);
      cand.side = side;
      const WindowSpec spec = make_window(cand.shape, side);
      const OffsetRect rect =
          spec.rect.clipped(ax, ay, lf.width, lf.height);
      if (rect.valid() && rect.count() >= 3) {
        cand.entropy = detail::candidate_entropy(
            center, init_disp, regions, ax, ay, rect, mismatch_label,
            occlusion, eparams, scratch);
        cand.evaluated = true;
      }
      table.push_back(cand);
    }
  }
  return table;
}

// Picks the entropy-maximizing window for one anchor. Ties go to the smaller
// window, then the lower shape index; the candidate order below enumerates
// exactly that priority. Occluded anchors additionally restrict matching to
// the viewpoints that keep the chosen window visible.
inline WindowChoice select_window(const LightField& lf,
                                  const DisparityMap& init_disp,
                                  const RegionMap& regions, int ax, int ay,
                                  const SelectParams& params = {}) {
  const std::vector<WindowCandidate> table =
      candidate_entropies(lf, init_disp, regions, ax, ay, params);

  const WindowCandidate* best = nullptr;
  for (const WindowCandidate& c : table) {
    if (!c.evaluated) continue;
    if (!best || c.entropy > best->entropy) best = &c;
  }

  WindowChoice choice;
  if (!best) {
    // every shape clipped away; fall back to the smallest square
    choice.window = make_window(WindowShape::Square, params.min_side);
    choice.window.rect =
        choice.window.rect.clipped(ax, ay, lf.width, lf.height);
    choice.viewpoints =
        visible_viewpoints(WindowShape::Square, lf.angular_u, lf.angular_v);
    return choice;
  }

  choice.window = make_window(best->shape, best->side);
  choice.window.rect = choice.window.rect.clipped(ax, ay, lf.width, lf.height);
  choice.entropy = best->entropy;
  const bool reduced = regions.at(ax, ay) == Region::Occluded;
  choice.viewpoints = visible_viewpoints(
      reduced ? best->shape : WindowShape::Square, lf.angular_u, lf.angular_v);
  return choice;
}

}  // namespace lfdisp
