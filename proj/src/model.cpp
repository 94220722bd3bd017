// Copyright 2026 The ewahidx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ewahidx/model.hpp"

#include <algorithm>
#include <cmath>

#include "ewahidx/error.hpp"

namespace ewahidx::model {

double delta(double r, double L, double n, unsigned w) {
  const double cells = L * n;
  if (cells <= 0) return 0;
  const double p = std::clamp(r / cells, 0.0, 1.0);
  // 1 - (1-p)^w without cancellation for tiny p.
  const double dirty_fraction = -std::expm1(static_cast<double>(w) * std::log1p(-p));
  return dirty_fraction * cells / w;
}

uint64_t bitmap_count_bound(double n_i, uint32_t k) {
  const double x = k * std::pow(n_i, 1.0 / k);
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, x)) return static_cast<uint64_t>(nearest);
  return static_cast<uint64_t>(std::ceil(x));
}

double sorting_gain(double n_i, uint32_t k, double n, unsigned w) {
  const double L = static_cast<double>(bitmap_count_bound(n_i, k));
  return 2 * delta(k * n, L, n, w) - 4 * n_i;
}

double gain_peak_estimate(uint32_t k, double n, unsigned w) {
  return std::pow(n * (w - 1) / 2, static_cast<double>(k) / (k + 1));
}

GainMax sorting_gain_argmax(uint32_t k, double n, unsigned w, uint64_t lo, uint64_t hi) {
  if (lo < 1 || hi < lo) throw InvalidArgument("empty scan range for sorting_gain_argmax");
  GainMax best{lo, sorting_gain(static_cast<double>(lo), k, n, w)};
  for (uint64_t x = lo + 1; x <= hi; ++x) {
    const double g = sorting_gain(static_cast<double>(x), k, n, w);
    if (g > best.gain) best = {x, g};
  }
  return best;
}

double query_cost_ratio(uint32_t k, double n_i) {
  if (k < 1) throw InvalidArgument("k must be at least 1");
  return (2.0 - 1.0 / k) * std::pow(n_i, static_cast<double>(k - 1) / k);
}

double column_score(double n_i, uint32_t k, unsigned w) {
  const double density = std::pow(n_i, -1.0 / k);
  return std::min(density, (1 - density) / (4.0 * w - 1));
}

double storage_cost_bound(double n_i, uint32_t k) {
  return 4 * n_i + static_cast<double>(bitmap_count_bound(n_i, k));
}

}  // namespace ewahidx::model
