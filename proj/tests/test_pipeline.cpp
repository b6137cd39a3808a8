#include "lfdisp/pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lfdisp/synth.hpp"

using namespace lfdisp;

namespace {

SceneSpec flat_noise_scene(int size = 48) {
  SceneSpec spec;
  spec.angular_u = spec.angular_v = 9;
  spec.width = spec.height = size;
  LayerSpec layer;
  layer.texture = LayerSpec::Texture::Noise;
  layer.seed = 5;
  layer.sigma = 0.2;
  layer.disparity = 0.6;
  spec.layers.push_back(layer);
  return spec;
}

SceneSpec two_layer_scene(int size = 64) {
  SceneSpec spec;
  spec.angular_u = spec.angular_v = 9;
  spec.width = spec.height = size;
  LayerSpec back;
  back.texture = LayerSpec::Texture::Noise;
  back.seed = 11;
  back.sigma = 0.2;
  back.disparity = 0.0;
  spec.layers.push_back(back);
  LayerSpec front = back;
  front.seed = 12;
  front.disparity = 2.0;
  const int lo = size / 3;
  const int hi = 2 * size / 3 - 1;
  front.support = RectI{lo, lo, hi, hi};
  spec.layers.push_back(front);
  return spec;
}

SceneConfig config_for(double d_min, double d_max) {
  SceneConfig cfg;
  cfg.disparity_min = d_min;
  cfg.disparity_max = d_max;
  return cfg;
}

}  // namespace

TEST(EstimateDisparity, RecoversConstantPlane) {
  const SynthResult r = render(flat_noise_scene());
  const EstimateResult est =
      estimate_disparity(r.lf, config_for(0.0, 1.2));

  size_t valid = 0;
  double sq = 0.0;
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x) {
      if (!est.disparity.valid.at(x, y)) continue;
      ++valid;
      const double e = est.disparity.values.at(x, y) - 0.6;
      sq += e * e;
    }
  ASSERT_GT(valid, 0u);
  EXPECT_GE(double(valid) / (48.0 * 48.0), 0.99);
  EXPECT_LE(std::sqrt(sq / double(valid)), 0.05);
}

TEST(EstimateDisparity, FastPathMatchesDirectEvaluation) {
  const SynthResult r = render(two_layer_scene(48));
  SceneConfig scene = config_for(-0.5, 2.5);
  EstimatorConfig cfg;
  cfg.fine_step = 0.1;  // keep the direct re-evaluation cheap
  const EstimateResult est = estimate_disparity(r.lf, scene, cfg);

  const Calibration cal = calibration_for(r.lf);
  const DisparityGrid fine =
      DisparityGrid::make(scene.disparity_min, scene.disparity_max,
                          cfg.fine_step);
  std::mt19937 gen(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int x = int(gen() % 48), y = int(gen() % 48);
    const WindowChoice choice = select_window(r.lf, est.initial, est.regions,
                                              x, y, cfg.select);
    const CostCurve curve = cost_curve(r.lf, x, y, choice, fine, cal,
                                       cfg.match);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    bool any = false;
    for (int i = 0; i < curve.size(); ++i) {
      if (!curve.valid[i]) continue;
      any = true;
      lo = std::min(lo, curve.cost[i]);
      hi = std::max(hi, curve.cost[i]);
    }
    if (!any || hi - lo < cfg.flat_tol) {
      EXPECT_FALSE(est.disparity.valid.at(x, y));
      continue;
    }
    ASSERT_TRUE(est.disparity.valid.at(x, y)) << "x=" << x << " y=" << y;
    const double direct = subpixel_refine(curve, fine);
    EXPECT_NEAR(est.disparity.values.at(x, y), direct, 1e-6)
        << "x=" << x << " y=" << y;
  }
}

TEST(EstimateDisparity, TexturelessSceneCompletesAllInvalid) {
  SceneSpec spec = flat_noise_scene(24);
  spec.layers[0].texture = LayerSpec::Texture::Constant;
  spec.layers[0].value = 0.5;
  const SynthResult r = render(spec);
  const EstimateResult est = estimate_disparity(r.lf, config_for(0.0, 1.2));
  EXPECT_EQ(est.disparity.valid_count(), 0u);
  for (Region reg : est.regions.data()) EXPECT_EQ(reg, Region::Smooth);
}

TEST(EstimateDisparity, DeterministicAcrossRuns) {
  const SynthResult r = render(two_layer_scene(32));
  const SceneConfig scene = config_for(-0.5, 2.5);
  const EstimateResult a = estimate_disparity(r.lf, scene);
  const EstimateResult b = estimate_disparity(r.lf, scene);
  EXPECT_TRUE(a.disparity.values == b.disparity.values);
  EXPECT_TRUE(a.disparity.valid == b.disparity.valid);
  EXPECT_TRUE(a.regions == b.regions);
}

TEST(EstimateDisparity, FixedBaselineUsesNoRegionAnalysis) {
  const SynthResult r = render(two_layer_scene(32));
  SceneConfig scene = config_for(-0.5, 2.5);
  EstimatorConfig cfg;
  cfg.adaptive = false;
  const EstimateResult est = estimate_disparity(r.lf, scene, cfg);
  for (Region reg : est.regions.data()) EXPECT_EQ(reg, Region::Texture);
  EXPECT_GT(est.disparity.valid_count(), 0u);
}

TEST(EstimateDisparity, AdaptiveBeatsFixedInsideOccludedBand) {
  const SynthResult r = render(two_layer_scene(64));
  const SceneConfig scene = config_for(-0.5, 2.5);
  EstimatorConfig adaptive_cfg;
  const EstimateResult adaptive =
      estimate_disparity(r.lf, scene, adaptive_cfg);
  EstimatorConfig fixed_cfg;
  fixed_cfg.adaptive = false;
  const EstimateResult fixed = estimate_disparity(r.lf, scene, fixed_cfg);

  int64_t band = 0, adaptive_not_worse = 0;
  int64_t bad_adaptive = 0, bad_fixed = 0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      if (!r.occluded_band.at(x, y)) continue;
      ++band;
      const double gt = r.gt.values.at(x, y);
      const double ea = adaptive.argmin.valid.at(x, y)
                            ? std::abs(adaptive.argmin.values.at(x, y) - gt)
                            : 1e9;
      const double ef = fixed.argmin.valid.at(x, y)
                            ? std::abs(fixed.argmin.values.at(x, y) - gt)
                            : 1e9;
      adaptive_not_worse += ea <= ef ? 1 : 0;
      const double ra = adaptive.disparity.valid.at(x, y)
                            ? std::abs(adaptive.disparity.values.at(x, y) - gt)
                            : 1e9;
      const double rf = fixed.disparity.valid.at(x, y)
                            ? std::abs(fixed.disparity.values.at(x, y) - gt)
                            : 1e9;
      bad_adaptive += ra > 0.1 ? 1 : 0;
      bad_fixed += rf > 0.1 ? 1 : 0;
    }
  ASSERT_GT(band, 0);
  EXPECT_GE(double(adaptive_not_worse) / double(band), 0.85);
  EXPECT_LT(bad_adaptive, bad_fixed);
}
