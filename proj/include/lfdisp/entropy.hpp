#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lfdisp/errors.hpp"

namespace lfdisp {

struct Histogram {
  std::vector<int64_t> counts;
  int64_t total = 0;

  int bin_count() const { return static_cast<int>(counts.size()); }
};

struct EntropyParams {
  double alpha1 = 1.0;          // weight of the disparity-consistency term
  double alpha2 = 0.0;          // weight of the anti-occlusion term
  int gray_bins = 32;           // histogram bins over [0,1]
  double disparity_bin_width = 0.1;  // one disparity search step
};

// One window pixel as seen by the entropy: its gray value, its initial
// disparity when one exists, and whether it belongs to the opposite
// occlusion class of the anchor.
struct WindowPixel {
  float gray = 0.0f;
  std::optional<float> init_disp;
  bool mismatched = false;
};

namespace detail {

inline double entropy_bits_from_counts(std::span<const int64_t> counts,
                                       int64_t total) {
  double h = 0.0;
  for (int64_t c : counts) {
    if (c <= 0) continue;
    const double p = double(c) / double(total);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace detail

// Shannon entropy in bits. Empty bins contribute nothing.
inline double shannon_entropy(const Histogram& h) {
  if (h.total <= 0) throw EmptyHistogram("histogram has no samples");
  return detail::entropy_bits_from_counts(h.counts, h.total);
}

// Uniform binning of gray values over [0,1]; the last bin is right-inclusive.
inline Histogram gray_histogram(std::span<const float> values, int bins) {
  if (values.empty()) throw EmptyInput("no gray values to bin");
  Histogram h;
  h.counts.assign(static_cast<size_t>(bins), 0);
  for (float v : values) {
    int idx = static_cast<int>(double(v) * bins);
    if (idx < 0) idx = 0;
    if (idx >= bins) idx = bins - 1;
    ++h.counts[idx];
  }
  h.total = static_cast<int64_t>(values.size());
  return h;
}

namespace detail {

// Entropy of values quantized to bins of the given width. Keys are counted
// after sorting so no bin range needs to be fixed in advance.
inline double quantized_entropy_bits(std::vector<int64_t>& keys) {
  if (keys.empty()) return 0.0;
  std::sort(keys.begin(), keys.end());
  const int64_t total = static_cast<int64_t>(keys.size());
  double h = 0.0;
  size_t i = 0;
  while (i < keys.size()) {
    size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    const double p = double(j - i) / double(total);
    h -= p * std::log2(p);
    i = j;
  }
  return h;
}

}  // namespace detail

// Matching entropy of a window: gray entropy minus the weighted disparity
// entropy minus the weighted entropy of the mismatched pixels' grays.
// Pixels without an initial disparity are skipped in the second term.
inline double matching_entropy(std::span<const WindowPixel> window,
                               const EntropyParams& params) {
  if (window.empty()) throw EmptyWindow("matching window has no pixels");

  std::vector<float> grays;
  grays.reserve(window.size());
  for (const WindowPixel& p : window) grays.push_back(p.gray);
  double e = shannon_entropy(gray_histogram(grays, params.gray_bins));

  if (params.alpha1 > 0.0) {
    std::vector<int64_t> keys;
    keys.reserve(window.size());
    for (const WindowPixel& p : window) {
      if (!p.init_disp) continue;
      keys.push_back(std::llround(double(*p.init_disp) /
                                  params.disparity_bin_width));
    }
    e -= params.alpha1 * detail::quantized_entropy_bits(keys);
  }

  if (params.alpha2 > 0.0) {
    std::vector<float> mis;
    for (const WindowPixel& p : window) {
      if (p.mismatched) mis.push_back(p.gray);
    }
    if (!mis.empty()) {
      e -= params.alpha2 *
           shannon_entropy(gray_histogram(mis, params.gray_bins));
    }
  }
  return e;
}

}  // namespace lfdisp
