/** Copyright 2026 The graphroute Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * 	http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Nelder-Mead simplex downhill minimization.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "graphroute/common.hpp"

namespace graphroute {

struct SimplexConfig {
  // Stop when every vertex lies within `tolerance` (L2) of the best one.
  double tolerance = 1e-8;
  std::size_t max_iterations = 20000;
  // 0 disables the evaluation cap.
  std::size_t max_evaluations = 0;
  // Edge length of the initial simplex along each axis.
  double initial_step = 1.0;

  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  double initial_value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// Minimizes `f` starting from `init`. `f` is called as f(std::span<const
// double>) and must return a finite value; a non-finite value at any probe
// throws OptimizerError. The returned vertex is never worse than `init`.
template <class F>
SimplexResult simplex_downhill(F&& f, std::span<const double> init,
                               const SimplexConfig& cfg = {}) {
  const std::size_t n = init.size();
  if (n == 0) throw OptimizerError("simplex_downhill needs at least one variable");

  SimplexResult res;
  auto eval = [&](const std::vector<double>& x) {
    const double v = f(std::span<const double>(x));
    ++res.evaluations;
    if (!std::isfinite(v)) throw OptimizerError("objective returned a non-finite value");
    return v;
  };

  std::vector<std::vector<double>> pts(n + 1, std::vector<double>(init.begin(), init.end()));
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += cfg.initial_step;
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);
  res.initial_value = vals[0];

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  // Running vertex sum keeps each centroid O(n) instead of O(n^2).
  std::vector<double> sum(n);
  auto recompute_sum = [&] {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (const auto& p : pts) {
      for (std::size_t i = 0; i < n; ++i) sum[i] += p[i];
    }
  };
  auto replace = [&](std::size_t k, const std::vector<double>& x, double v) {
    for (std::size_t i = 0; i < n; ++i) sum[i] += x[i] - pts[k][i];
    pts[k] = x;
    vals[k] = v;
  };
  recompute_sum();

  auto budget_left = [&] {
    return cfg.max_evaluations == 0 || res.evaluations < cfg.max_evaluations;
  };
  auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
  };
  auto diameter = [&] {
    const auto& best = pts[order[0]];
    double worst = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      double d2 = 0.0;
      const auto& p = pts[order[k]];
      for (std::size_t i = 0; i < n; ++i) d2 += (p[i] - best[i]) * (p[i] - best[i]);
      worst = std::max(worst, d2);
    }
    return std::sqrt(worst);
  };

  sort_vertices();
  while (res.iterations < cfg.max_iterations && budget_left()) {
    // The diameter is O(n^2); large simplices check it once per n steps.
    const bool check = n <= 32 || res.iterations % n == 0;
    if (check && diameter() < cfg.tolerance) {
      res.converged = true;
      break;
    }
    ++res.iterations;
    const std::size_t best = order[0];
    const std::size_t worst = order[n];
    const std::size_t second_worst = order[n - 1];
    if (res.iterations % (n + 1) == 0) recompute_sum();

    const auto& pw = pts[worst];
    for (std::size_t i = 0; i < n; ++i) centroid[i] = (sum[i] - pw[i]) / static_cast<double>(n);

    for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + cfg.reflection * (centroid[i] - pw[i]);
    const double fr = eval(xr);

    if (fr < vals[best]) {
      for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + cfg.expansion * (xr[i] - centroid[i]);
      const double fe = eval(xe);
      if (fe < fr) {
        replace(worst, xe, fe);
      } else {
        replace(worst, xr, fr);
      }
    } else if (fr < vals[second_worst]) {
      replace(worst, xr, fr);
    } else {
      // Outside contraction when the reflection beat the worst vertex,
      // inside contraction otherwise.
      const bool outside = fr < vals[worst];
      const auto& anchor = outside ? xr : pw;
      for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] + cfg.contraction * (anchor[i] - centroid[i]);
      const double fc = eval(xc);
      if (fc < (outside ? fr : vals[worst])) {
        replace(worst, xc, fc);
      } else {
        const auto pb = pts[best];
        for (std::size_t k = 0; k <= n; ++k) {
          if (k == best) continue;
          for (std::size_t i = 0; i < n; ++i) pts[k][i] = pb[i] + cfg.shrink * (pts[k][i] - pb[i]);
          vals[k] = eval(pts[k]);
        }
        recompute_sum();
      }
    }
    sort_vertices();
  }
  if (!res.converged && diameter() < cfg.tolerance) res.converged = true;

  res.x = pts[order[0]];
  res.value = vals[order[0]];
  return res;
}

}  // namespace graphroute
