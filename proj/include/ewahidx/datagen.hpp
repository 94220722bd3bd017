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
// Seeded synthetic tables with independent uniform or Zipfian columns.
//
// The value of rank r (1-based; rank 1 is the most frequent under Zipf) is
// written as r zero-padded to the width of the cardinality, so byte order
// and rank order agree. Draws use Rng (mt19937_64) in row-major order; the
// Zipf sampler inverts a precomputed CDF.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ewahidx/table.hpp"

namespace ewahidx {

struct ColumnSpec {
  enum class Kind : uint8_t { Uniform, Zipf };
  Kind kind = Kind::Uniform;
  uint64_t cardinality = 1;
  double s = 1.0;

  // "uniform:<n>" or "zipf:<n>[:<s>]" (s defaults to 1).
  static ColumnSpec parse(std::string_view text);
  std::string name() const;
};

struct GenSpec {
  uint64_t rows = 0;
  std::vector<ColumnSpec> columns;
  uint64_t seed = 1;
  char delimiter = ',';

  // Throws InvalidArgument for an unusable spec.
  void validate() const;
};

std::string value_label(uint64_t rank, uint64_t cardinality);

// Samples ranks in [1, cardinality] by inverse CDF of P(r) ~ 1/r^s.
class ZipfSampler {
 public:
  ZipfSampler(uint64_t cardinality, double s);
  // u uniform in [0, 1).
  uint64_t sample(double u) const;
  double probability(uint64_t rank) const;

 private:
  std::vector<double> cdf_;
};

StringRows generate_rows(const GenSpec& spec);
void generate_file(const GenSpec& spec, const std::string& path);

}  // namespace ewahidx
