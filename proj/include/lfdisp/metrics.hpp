#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "lfdisp/errors.hpp"
#include "lfdisp/image.hpp"
#include "lfdisp/region.hpp"

namespace lfdisp {

constexpr std::array<double, 4> kBadPixThresholds = {0.01, 0.03, 0.07, 0.1};

struct RegionMetrics {
  double mse_x100 = 0.0;
  std::map<double, double> badpix;  // threshold -> fraction of bad pixels
  int64_t evaluated = 0;            // pixels with ground truth in the mask
  int64_t invalid_est = 0;          // estimated-invalid pixels among them
};

struct MetricsReport {
  RegionMetrics overall;
  std::map<Region, RegionMetrics> per_region;
};

namespace detail {

struct MetricAccum {
  double sq_sum = 0.0;
  int64_t mse_count = 0;
  int64_t evaluated = 0;
  int64_t invalid_est = 0;
  std::array<int64_t, kBadPixThresholds.size()> bad{};

  void add(double est, bool est_valid, double gt) {
    ++evaluated;
    if (!est_valid) {
      ++invalid_est;
      for (size_t t = 0; t < bad.size(); ++t) ++bad[t];
      return;
    }
    const double err = std::abs(est - gt);
    sq_sum += err * err;
    ++mse_count;
    for (size_t t = 0; t < kBadPixThresholds.size(); ++t)
      if (err > kBadPixThresholds[t]) ++bad[t];
  }

  RegionMetrics finish() const {
    RegionMetrics m;
    m.evaluated = evaluated;
    m.invalid_est = invalid_est;
    m.mse_x100 = mse_count > 0 ? 100.0 * sq_sum / double(mse_count) : 0.0;
    for (size_t t = 0; t < kBadPixThresholds.size(); ++t)
      m.badpix[kBadPixThresholds[t]] =
          evaluated > 0 ? double(bad[t]) / double(evaluated) : 0.0;
    return m;
  }
};

}  // namespace detail

// MSE (x100) and BadPix fractions of an estimate against the ground truth,
// over ground-truth-valid pixels inside the optional mask. Invalid estimated
// pixels count as bad at every threshold but stay out of the MSE.
inline MetricsReport compute_metrics(const DisparityMap& est,
                                     const DisparityMap& gt,
                                     const RegionMap* regions = nullptr,
                                     const Grid<uint8_t>* mask = nullptr) {
  if (!est.values.same_shape(gt.values))
    throw ShapeMismatch("estimate and ground truth shapes differ");
  if (regions && !regions->same_shape(gt.values))
    throw ShapeMismatch("region map shape differs");
  if (mask && !mask->same_shape(gt.values))
    throw ShapeMismatch("mask shape differs");

  detail::MetricAccum overall;
  std::map<Region, detail::MetricAccum> per_region;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (!gt.valid.at(x, y)) continue;
      if (mask && !mask->at(x, y)) continue;
      const double g = gt.values.at(x, y);
      const double e = est.values.at(x, y);
      const bool ev = est.valid.at(x, y) != 0;
      overall.add(e, ev, g);
      if (regions) per_region[regions->at(x, y)].add(e, ev, g);
    }
  }
  if (overall.evaluated == 0)
    throw EmptyMask("no ground-truth pixels to evaluate");

  MetricsReport report;
  report.overall = overall.finish();
  for (const auto& [label, acc] : per_region)
    report.per_region[label] = acc.finish();
  return report;
}

struct ProfileSample {
  int x = 0;
  float value = 0.0f;
  bool valid = false;
};

// One image row of a disparity map, in column order.
inline std::vector<ProfileSample> extract_profile(const DisparityMap& map,
                                                  int row) {
  if (row < 0 || row >= map.height())
    throw RowOutOfBounds("row " + std::to_string(row) + " outside map");
  std::vector<ProfileSample> profile;
  profile.reserve(static_cast<size_t>(map.width()));
  for (int x = 0; x < map.width(); ++x)
    profile.push_back(
        {x, map.values.at(x, row), map.valid.at(x, row) != 0});
  return profile;
}

}  // namespace lfdisp
