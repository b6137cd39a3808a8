#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "lfdisp/image.hpp"

namespace lfdisp {

struct TVParams {
  double gamma = 0.2;    // regularization weight
  double epsilon = 1e-3; // TV smoothing
  int max_iters = 200;
  double rel_tol = 1e-4; // stop when the max update falls below this
};

namespace detail {

// Discrete smoothed-TV objective restricted to the smooth region:
// sum_p w_p (mu_p - f_p)^2 + gamma * sum_{p in S} sqrt(dx^2 + dy^2 + eps^2)
// with forward differences that only couple participating pixels.
inline double tv_energy(const std::vector<double>& mu,
                        const std::vector<uint8_t>& participates,
                        const std::vector<uint8_t>& in_smooth,
                        const std::vector<double>& data_weight,
                        const std::vector<double>& data_value, int w, int h,
                        const TVParams& params) {
  double e = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t p = size_t(y) * w + x;
      if (!in_smooth[p]) continue;
      if (data_weight[p] > 0.0) {
        const double r = mu[p] - data_value[p];
        e += data_weight[p] * r * r;
      }
      double dx = 0.0, dy = 0.0;
      if (x + 1 < w && participates[p + 1]) dx = mu[p + 1] - mu[p];
      if (y + 1 < h && participates[p + w]) dy = mu[p + w] - mu[p];
      e += params.gamma *
           std::sqrt(dx * dx + dy * dy + params.epsilon * params.epsilon);
    }
  }
  return e;
}

}  // namespace detail

// Fills black holes and denoises the disparity inside the smooth region by
// minimizing the smoothed-TV energy with a lagged-diffusivity fixed point
// (one Jacobi sweep per outer iteration, so the energy never increases).
// Pixels outside the smooth mask are returned bit-identically; invalid
// pixels inside it carry no data term and are purely inpainted. Valid values
// on the smooth boundary act as Dirichlet data; image borders are Neumann.
inline DisparityMap tv_refine(const DisparityMap& disp,
                              const Grid<uint8_t>& smooth_mask,
                              const TVParams& params = {},
                              std::vector<double>* energy_trace = nullptr) {
  const int w = disp.width(), h = disp.height();
  const size_t n = size_t(w) * h;

  std::vector<uint8_t> in_smooth(n, 0), participates(n, 0);
  std::vector<double> mu(n, 0.0), data_weight(n, 0.0), data_value(n, 0.0);

  double fill = 0.0;
  {
    double sum = 0.0;
    int64_t cnt = 0;
    for (size_t p = 0; p < n; ++p)
      if (disp.valid.data()[p]) {
        sum += disp.values.data()[p];
        ++cnt;
      }
    if (cnt > 0) fill = sum / double(cnt);
  }

  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  for (size_t p = 0; p < n; ++p) {
    const bool valid = disp.valid.data()[p] != 0;
    const bool smooth = smooth_mask.data()[p] != 0;
    in_smooth[p] = smooth ? 1 : 0;
    participates[p] = (smooth || valid) ? 1 : 0;
    const double v = disp.values.data()[p];
    if (valid) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    mu[p] = valid ? v : fill;
    if (smooth && valid) {
      data_weight[p] = 1.0;
      data_value[p] = v;
    }
  }
  const double tol_scale = (vmax > vmin) ? (vmax - vmin) : 1.0;

  std::vector<double> s(n, 0.0), mu_new(mu);
  for (int iter = 0; iter < params.max_iters; ++iter) {
    // lagged diffusivity coefficients at the current iterate
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const size_t p = size_t(y) * w + x;
        if (!in_smooth[p]) continue;
        double dx = 0.0, dy = 0.0;
        if (x + 1 < w && participates[p + 1]) dx = mu[p + 1] - mu[p];
        if (y + 1 < h && participates[p + w]) dy = mu[p + w] - mu[p];
        s[p] = std::sqrt(dx * dx + dy * dy + params.epsilon * params.epsilon);
      }
    }

    double max_delta = 0.0;
#pragma omp parallel for schedule(static) reduction(max : max_delta)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const size_t p = size_t(y) * w + x;
        if (!in_smooth[p]) continue;
        double a = 2.0 * data_weight[p];
        double b = 2.0 * data_weight[p] * data_value[p];
        const double k = params.gamma / s[p];
        if (x + 1 < w && participates[p + 1]) {
          a += k;
          b += k * mu[p + 1];
        }
        if (y + 1 < h && participates[p + w]) {
          a += k;
          b += k * mu[p + w];
        }
        if (x - 1 >= 0 && in_smooth[p - 1]) {
          const double k2 = params.gamma / s[p - 1];
          a += k2;
          b += k2 * mu[p - 1];
        }
        if (y - 1 >= 0 && in_smooth[p - size_t(w)]) {
          const double k2 = params.gamma / s[p - size_t(w)];
          a += k2;
          b += k2 * mu[p - size_t(w)];
        }
        const double next = (a > 0.0) ? b / a : mu[p];
        max_delta = std::max(max_delta, std::abs(next - mu[p]));
        mu_new[p] = next;
      }
    }
    for (size_t p = 0; p < n; ++p)
      if (in_smooth[p]) mu[p] = mu_new[p];

    if (energy_trace)
      energy_trace->push_back(detail::tv_energy(mu, participates, in_smooth,
                                                data_weight, data_value, w, h,
                                                params));
    if (max_delta < params.rel_tol * tol_scale) break;
  }

  DisparityMap out = disp;  // non-smooth pixels stay bit-identical
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t p = size_t(y) * w + x;
      if (!in_smooth[p]) continue;
      out.values.at(x, y) = static_cast<float>(mu[p]);
      out.valid.at(x, y) = 1;
    }
  }
  return out;
}

}  // namespace lfdisp
