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
//
// Closed-form cost models for k-of-N indexes. All arithmetic is in double
// precision; the only rounding is the ceiling in the bitmap count k n^(1/k).

#pragma once

#include <cstdint>

namespace ewahidx::model {

// Expected dirty words when r ones are spread uniformly over L bitmaps of n
// bits each: (1 - (1 - r/(Ln))^w) Ln/w. Requires 0 <= r <= Ln.
double delta(double r, double L, double n, unsigned w);

// ceil(k n_i^(1/k)), robust to n_i being an exact k-th power.
uint64_t bitmap_count_bound(double n_i, uint32_t k);

// Words saved by sorting a column of cardinality n_i:
// 2 delta(kn, ceil(k n_i^(1/k)), n) - 4 n_i. Negative when sorting does not
// pay off.
double sorting_gain(double n_i, uint32_t k, double n, unsigned w);

// Approximate location of the maximum of sorting_gain: (n(w-1)/2)^(k/(k+1)).
double gain_peak_estimate(uint32_t k, double n, unsigned w);

struct GainMax {
  uint64_t n_i = 0;
  double gain = 0;
};

// Exhaustive integer scan of sorting_gain over n_i in [lo, hi].
GainMax sorting_gain_argmax(uint32_t k, double n, unsigned w, uint64_t lo, uint64_t hi);

// Equality-query cost relative to k = 1: (2 - 1/k) n_i^((k-1)/k).
double query_cost_ratio(uint32_t k, double n_i);

// Column ordering score min(n_i^(-1/k), (1 - n_i^(-1/k)) / (4w - 1)). Columns
// are best sorted first when the score is high.
double column_score(double n_i, uint32_t k, unsigned w);

// Storage-cost ceiling for a sorted column: 4 n_i + ceil(k n_i^(1/k)).
double storage_cost_bound(double n_i, uint32_t k);

}  // namespace ewahidx::model
