#include "lfdisp/region.hpp"

#include <gtest/gtest.h>

#include <random>

#include "lfdisp/synth.hpp"

using namespace lfdisp;

namespace {

SceneSpec two_layer_scene() {
  SceneSpec spec;
  spec.angular_u = spec.angular_v = 9;
  spec.width = spec.height = 96;
  LayerSpec back;
  back.texture = LayerSpec::Texture::Noise;
  back.seed = 11;
  back.sigma = 0.2;
  back.disparity = 0.0;
  spec.layers.push_back(back);
  LayerSpec front = back;
  front.seed = 12;
  front.disparity = 2.0;
  front.support = RectI{30, 30, 61, 61};
  spec.layers.push_back(front);
  return spec;
}

double jaccard(const Grid<uint8_t>& a, const Grid<uint8_t>& b) {
  int64_t inter = 0, uni = 0;
  for (size_t i = 0; i < a.data().size(); ++i) {
    const bool pa = a.data()[i] != 0, pb = b.data()[i] != 0;
    inter += (pa && pb) ? 1 : 0;
    uni += (pa || pb) ? 1 : 0;
  }
  return uni > 0 ? double(inter) / double(uni) : 1.0;
}

}  // namespace

TEST(IndicatorViewpoints, CenterPlusEightExtremes) {
  const IndicatorViewpoints vps = make_indicator_viewpoints(9, 9);
  ASSERT_EQ(vps.size(), 9u);
  EXPECT_EQ(vps.indices[0], (std::pair<int, int>{4, 4}));
  for (const auto& [u, v] : vps.indices) {
    EXPECT_TRUE(u == 0 || u == 4 || u == 8);
    EXPECT_TRUE(v == 0 || v == 4 || v == 8);
  }
}

TEST(IndicatorViewpoints, DegenerateGridDeduplicates) {
  EXPECT_EQ(make_indicator_viewpoints(1, 1).size(), 1u);
  EXPECT_EQ(make_indicator_viewpoints(3, 3).size(), 9u);
}

TEST(SegmentViews, FlatSceneGetsOneLayerEverywhere) {
  SceneSpec spec = two_layer_scene();
  spec.layers.pop_back();  // single plane
  const SynthResult r = render(spec);
  const Calibration cal = calibration_for(r.lf);
  const DisparityGrid grid = DisparityGrid::make(-0.5, 2.5, 0.1);
  const DisparityMap init = initial_disparity(r.lf, cal, grid);
  const IndicatorViewpoints vps = make_indicator_viewpoints(9, 9);
  const SegMapSet segs = segment_views(r.lf, init, vps, 2, grid);
  ASSERT_EQ(segs.size(), 9u);
  for (const auto& [vp, seg] : segs)
    for (float v : seg.data()) EXPECT_EQ(v, seg.data()[0]);
}

TEST(SegmentViews, SingleLayerDegeneratesToZeroDiff) {
  const SynthResult r = render(two_layer_scene());
  const Calibration cal = calibration_for(r.lf);
  const DisparityGrid grid = DisparityGrid::make(-0.5, 2.5, 0.1);
  const DisparityMap init = initial_disparity(r.lf, cal, grid);
  const IndicatorViewpoints vps = make_indicator_viewpoints(9, 9);
  const SegMapSet segs = segment_views(r.lf, init, vps, 1, grid);
  for (const auto& [vp, seg] : segs)
    for (float v : seg.data()) EXPECT_EQ(v, 0.0f);
  const Grid<float> diff =
      segmentation_diff(segs, segs.at({4, 4}), 4, 4, init);
  for (float v : diff.data()) EXPECT_EQ(v, 0.0f);
}

TEST(SegmentViews, RequiresEnoughInitialDisparity) {
  const SynthResult r = render(two_layer_scene());
  DisparityMap init(96, 96);  // everything invalid
  const IndicatorViewpoints vps = make_indicator_viewpoints(9, 9);
  const DisparityGrid grid = DisparityGrid::make(-0.5, 2.5, 0.1);
  EXPECT_THROW(segment_views(r.lf, init, vps, 4, grid),
               InsufficientInitialDisparity);
}

TEST(SegmentViews, SquarePositionTracksViewDisparity) {
  const SynthResult r = render(two_layer_scene());
  const Calibration cal = calibration_for(r.lf);
  const DisparityGrid grid = DisparityGrid::make(-0.5, 2.5, 0.1);
  const DisparityMap init = initial_disparity(r.lf, cal, grid);
  const IndicatorViewpoints vps = make_indicator_viewpoints(9, 9);
  const SegMapSet segs = segment_views(r.lf, init, vps, 4, grid);

  const SegMap& center = segs.at({4, 4});
  const SegMap& left = segs.at({0, 4});  // delta_u = -4, square shifts by -8
  const float lo = center.at(5, 46);
  const float hi = center.at(46, 46);
  EXPECT_LT(lo, hi);
  EXPECT_EQ(center.at(46, 46), hi);
  // interior of the shifted square in the left view: [22+, 53-]
  EXPECT_EQ(left.at(38, 46), hi);
  EXPECT_EQ(left.at(70, 46), lo);  // old right edge region is background here
}

TEST(SegmentationDiff, IdenticalSegmentationsGiveZero) {
  SegMap seg(8, 8, 1.0f);
  SegMapSet segs;
  for (int u : {0, 2})
    for (int v : {0, 2}) segs.emplace(std::make_pair(u, v), seg);
  segs.emplace(std::make_pair(1, 1), seg);
  DisparityMap init(8, 8);
  std::fill(init.valid.data().begin(), init.valid.data().end(), 1);
  const Grid<float> diff =
      segmentation_diff(segs, seg, 1, 1, init, DiffShift::InitDisparity);
  for (float v : diff.data()) EXPECT_EQ(v, 0.0f);
}

TEST(SegmentationDiff, SignMatchesOcclusionDirection) {
  // center pixel on the high layer where one view sees the low layer gives a
  // positive contribution
  SegMap center(4, 4, 1.0f);
  SegMap other(4, 4, 1.0f);
  other.at(2, 2) = 0.0f;
  SegMapSet segs;
  segs.emplace(std::make_pair(1, 1), center);
  segs.emplace(std::make_pair(2, 1), other);
  DisparityMap init(4, 4);
  std::fill(init.valid.data().begin(), init.valid.data().end(), 1);
  const Grid<float> diff =
      segmentation_diff(segs, center, 1, 1, init, DiffShift::None);
  EXPECT_GT(diff.at(2, 2), 0.0f);
  EXPECT_EQ(diff.at(0, 0), 0.0f);
}

TEST(SegmentationDiff, ShapeMismatchRejected) {
  SegMap center(4, 4, 1.0f);
  SegMapSet segs;
  segs.emplace(std::make_pair(0, 1), SegMap(3, 4, 1.0f));
  DisparityMap init(4, 4);
  EXPECT_THROW(segmentation_diff(segs, center, 1, 1, init), ShapeMismatch);
}

TEST(SegmentationDiff, InvariantToConstantLayerOffset) {
  const SynthResult r = render(two_layer_scene());
  const Calibration cal = calibration_for(r.lf);
  const DisparityGrid grid = DisparityGrid::make(-0.5, 2.5, 0.1);
  const DisparityMap init = initial_disparity(r.lf, cal, grid);
  const IndicatorViewpoints vps = make_indicator_viewpoints(9, 9);
  SegMapSet segs = segment_views(r.lf, init, vps, 4, grid);
  const SegMap& center = segs.at({4, 4});
  const Grid<float> base = segmentation_diff(segs, center, 4, 4, init);

  SegMapSet shifted = segs;
  for (auto& [vp, seg] : shifted)
    for (float& v : seg.data()) v += 5.0f;
  const Grid<float> offset = segmentation_diff(
      shifted, shifted.at({4, 4}), 4, 4, init);
  for (size_t i = 0; i < base.data().size(); ++i)
    EXPECT_FLOAT_EQ(base.data()[i], offset.data()[i]);
}

TEST(ClassifyRegions, ConstantImageIsAllSmooth) {
  const Image img(16, 16, 0.5f);
  const Grid<float> diff(16, 16, 0.0f);
  const RegionMap regions = classify_regions(diff, img);
  for (Region r : regions.data()) EXPECT_EQ(r, Region::Smooth);
}

TEST(ClassifyRegions, NoiseImageIsAllTexture) {
  std::mt19937 gen(5);
  std::normal_distribution<double> nd(0.5, 0.2);
  Image img(32, 32);
  for (float& px : img.data())
    px = float(std::clamp(nd(gen), 0.0, 1.0));
  const Grid<float> diff(32, 32, 0.0f);
  const RegionMap regions = classify_regions(diff, img, 2, 0.02);
  // borders keep the nominal tau, so clipped neighborhoods lean smooth;
  // the statistical claim is about interior pixels
  int texture = 0, interior = 0;
  for (int y = 2; y < 30; ++y)
    for (int x = 2; x < 30; ++x) {
      ++interior;
      texture += regions.at(x, y) == Region::Texture ? 1 : 0;
    }
  EXPECT_GT(texture, interior * 99 / 100);
}

TEST(ClassifyRegions, PriorityOrderAndPartition) {
  Image img(4, 4, 0.5f);
  Grid<float> diff(4, 4, 0.0f);
  diff.at(0, 0) = -1.0f;
  diff.at(1, 0) = 2.0f;
  const RegionMap regions = classify_regions(diff, img);
  EXPECT_EQ(regions.at(0, 0), Region::Occluded);
  EXPECT_EQ(regions.at(1, 0), Region::Occluding);
  EXPECT_EQ(regions.at(2, 2), Region::Smooth);
  for (Region r : regions.data())
    EXPECT_TRUE(r == Region::Occluding || r == Region::Occluded ||
                r == Region::Texture || r == Region::Smooth);
}

TEST(IdentifyRegions, TwoLayerBandsMatchAnalyticOracle) {
  const SynthResult r = render(two_layer_scene());
  const Calibration cal = calibration_for(r.lf);
  const DisparityGrid grid = DisparityGrid::make(-0.5, 2.5, 0.1);
  const DisparityMap init = initial_disparity(r.lf, cal, grid);
  const RegionsResult regions = identify_regions(r.lf, init, grid);

  Grid<uint8_t> est_occluding(96, 96, 0), est_occluded(96, 96, 0);
  for (int y = 0; y < 96; ++y)
    for (int x = 0; x < 96; ++x) {
      if (regions.map.at(x, y) == Region::Occluding)
        est_occluding.at(x, y) = 1;
      if (regions.map.at(x, y) == Region::Occluded) est_occluded.at(x, y) = 1;
    }
  EXPECT_GE(jaccard(est_occluding, r.occluding_band), 0.6);
  EXPECT_GE(jaccard(est_occluded, r.occluded_band), 0.6);

  // no occlusion labels far from the layer edge: segmentation window radius
  // (3) plus the maximal shift (8)
  const int margin = 3 + 8;
  for (int y = 0; y < 96; ++y)
    for (int x = 0; x < 96; ++x) {
      if (regions.map.at(x, y) != Region::Occluding &&
          regions.map.at(x, y) != Region::Occluded)
        continue;
      const int d_left = std::abs(x - 30), d_right = std::abs(x - 61);
      const int d_top = std::abs(y - 30), d_bot = std::abs(y - 61);
      const int dist = std::min({d_left, d_right, d_top, d_bot});
      EXPECT_LE(dist, margin) << "x=" << x << " y=" << y;
    }
}
