#include "lfdisp/select.hpp"

#include <gtest/gtest.h>

#include "lfdisp/synth.hpp"

using namespace lfdisp;

namespace {

struct Fixture {
  SynthResult scene;
  DisparityMap init;
  RegionsResult regions;

  explicit Fixture(const SceneSpec& spec) : scene(render(spec)) {
    const Calibration cal = calibration_for(scene.lf);
    const DisparityGrid grid = DisparityGrid::make(-0.5, 2.5, 0.1);
    init = initial_disparity(scene.lf, cal, grid);
    regions = identify_regions(scene.lf, init, grid);
  }
};

SceneSpec flat_noise_scene() {
  SceneSpec spec;
  spec.angular_u = spec.angular_v = 9;
  spec.width = spec.height = 48;
  LayerSpec layer;
  layer.texture = LayerSpec::Texture::Noise;
  layer.seed = 5;
  layer.sigma = 0.2;
  layer.disparity = 0.6;
  spec.layers.push_back(layer);
  return spec;
}

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

}  // namespace

TEST(SelectWindow, ConstantRegionFallsBackToSmallestSquare) {
  SceneSpec spec = flat_noise_scene();
  spec.layers[0].texture = LayerSpec::Texture::Constant;
  spec.layers[0].value = 0.5;
  spec.layers[0].disparity = 0.0;
  const SynthResult scene = render(spec);
  DisparityMap init(48, 48);
  std::fill(init.values.data().begin(), init.values.data().end(), 0.0f);
  std::fill(init.valid.data().begin(), init.valid.data().end(), 1);
  RegionMap regions(48, 48, Region::Smooth);

  const WindowChoice c = select_window(scene.lf, init, regions, 24, 24);
  EXPECT_EQ(c.window.shape, WindowShape::Square);
  EXPECT_EQ(c.window.side, 3);  // every candidate scores zero; tie-break
  EXPECT_EQ(c.entropy, 0.0);
  EXPECT_EQ(c.viewpoints.size(), 81u);
}

TEST(SelectWindow, RichTexturePrefersLargerSquares) {
  const Fixture f(flat_noise_scene());
  const WindowChoice c = select_window(f.scene.lf, f.init, f.regions.map,
                                       24, 24);
  EXPECT_EQ(c.window.shape, WindowShape::Square);
  EXPECT_GT(c.window.side, 3);
  EXPECT_EQ(c.viewpoints.size(), 81u);

  // the reported entropy is the maximum of the whole candidate table
  const auto table = candidate_entropies(f.scene.lf, f.init, f.regions.map,
                                         24, 24, SelectParams{});
  double max_e = -1e30;
  for (const auto& cand : table)
    if (cand.evaluated) max_e = std::max(max_e, cand.entropy);
  EXPECT_DOUBLE_EQ(c.entropy, max_e);
}

TEST(SelectWindow, OccludedAnchorOpensAwayFromOccluder) {
  const Fixture f(two_layer_scene());
  // left occluded band, occluder to the right
  int ax = -1, ay = 46;
  for (int x = 24; x <= 29; ++x)
    if (f.regions.map.at(x, 46) == Region::Occluded) ax = x;
  ASSERT_GT(ax, 0) << "no occluded label found on the left band";

  const WindowChoice c = select_window(f.scene.lf, f.init, f.regions.map,
                                       ax, ay);
  const auto [dx, dy] = shape_direction(c.window.shape);
  EXPECT_EQ(dx, -1) << "window should open left, away from the occluder";

  // the left-opening window beats every square candidate
  const auto table = candidate_entropies(f.scene.lf, f.init, f.regions.map,
                                         ax, ay, SelectParams{});
  double best_square = -1e30;
  for (const auto& cand : table)
    if (cand.evaluated && cand.shape == WindowShape::Square)
      best_square = std::max(best_square, cand.entropy);
  EXPECT_GT(c.entropy, best_square);

  // reduced viewpoint set: only views that keep the window visible
  for (const auto& [u, v] : c.viewpoints.indices) EXPECT_GE(u, 4);
  EXPECT_LT(c.viewpoints.size(), 81u);
}

TEST(SelectWindow, OccludingAnchorKeepsFullViewpointSet) {
  const Fixture f(two_layer_scene());
  int ax = -1, ay = 46;
  for (int x = 30; x <= 37; ++x)
    if (f.regions.map.at(x, 46) == Region::Occluding) ax = x;
  ASSERT_GT(ax, 0);
  const WindowChoice c = select_window(f.scene.lf, f.init, f.regions.map,
                                       ax, ay);
  EXPECT_EQ(c.viewpoints.size(), 81u);
}

TEST(SelectWindow, AnchorAlwaysInsideMask) {
  const Fixture f(flat_noise_scene());
  for (const auto& [ax, ay] : {std::pair<int, int>{0, 0},
                               {47, 47},
                               {0, 24},
                               {24, 0},
                               {24, 24}}) {
    const WindowChoice c = select_window(f.scene.lf, f.init, f.regions.map,
                                         ax, ay);
    EXPECT_TRUE(c.window.rect.contains(0, 0));
    EXPECT_GE(c.window.rect.count(), 3);
  }
}

TEST(SelectWindow, Deterministic) {
  const Fixture f(two_layer_scene());
  const WindowChoice a = select_window(f.scene.lf, f.init, f.regions.map,
                                       28, 46);
  const WindowChoice b = select_window(f.scene.lf, f.init, f.regions.map,
                                       28, 46);
  EXPECT_EQ(a.window.shape, b.window.shape);
  EXPECT_EQ(a.window.side, b.window.side);
  EXPECT_EQ(a.entropy, b.entropy);
  EXPECT_EQ(a.viewpoints.indices, b.viewpoints.indices);
}
