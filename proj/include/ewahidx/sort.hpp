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
// -----------------------------------------------------------------------------
// File: sort.hpp
// -----------------------------------------------------------------------------
//
// Row orderings for improving bitmap compression, in memory and as a
// two-phase external merge sort over delimited files.
//
// Every ordering is expressed as a fixed-width key of 32-bit integers derived
// from a row's dictionary ranks; rows compare by key, then by input position.
// All sorts are therefore stable and the output does not depend on the
// memory budget or the number of worker threads.
//
//   none        input order.
//   lex         ranks of the columns taken in the order column_order.
//   block:B     lex within each of B contiguous, near-equal row blocks.
//   gray-freq   per column (in column_order): frequency descending, then
//               rank.
//   fc          each row's components sorted by (frequency, column, rank),
//               rows compared on that sequence; no column order applies.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ewahidx/table.hpp"

namespace ewahidx {

enum class Ordering : uint8_t { None, Lex, Block, GrayFrequency, FrequentComponent };

struct SortPlan {
  Ordering ordering = Ordering::Lex;
  uint64_t blocks = 1;
  // 0-based columns, most significant first. Empty means identity.
  std::vector<uint32_t> column_order;

  // none | lex | block:<B> | gray-freq | fc
  static SortPlan parse(std::string_view text);
  std::string name() const;
};

// Parses a 1-based, comma-separated column permutation ("3,1,2") into
// 0-based indices. Throws InvalidArgument unless it permutes [1, columns].
std::vector<uint32_t> parse_column_order(std::string_view text, size_t columns);
std::string format_column_order(std::span<const uint32_t> order);

// Orders columns by model::column_score descending (ties by index), using
// each column's effective k for the requested weight.
std::vector<uint32_t> suggest_column_order(const TableProfile& profile, uint32_t k,
                                           unsigned w);

// Builds sort keys for one plan.
class SortKey {
 public:
  SortKey(const SortPlan& plan, const TableProfile& profile);

  size_t width() const { return width_; }
  void make(uint64_t row_index, std::span<const uint32_t> ranks, uint32_t* key) const;

 private:
  SortPlan plan_;
  const TableProfile* profile_;
  std::vector<uint32_t> order_;
  std::vector<std::vector<uint32_t>> freq_position_;
  uint64_t rows_ = 0;
  size_t width_ = 0;
};

// Stable sorting permutation: result[i] is the input row placed at i.
std::vector<uint64_t> sort_permutation(const EncodedTable& table, const TableProfile& profile,
                                       const SortPlan& plan);
EncodedTable sort_encoded(const EncodedTable& table, const TableProfile& profile,
                          const SortPlan& plan);
EncodedTable permute_rows(const EncodedTable& table, std::span<const uint64_t> permutation);

struct SortOptions {
  uint64_t memory_bytes = uint64_t{256} << 20;
  // Rows per in-memory chunk; overrides memory_bytes when nonzero.
  uint64_t memory_rows = 0;
  // Directory for run files; defaults to the output file's directory.
  std::string temp_dir;
  unsigned threads = 1;
};

struct SortReport {
  uint64_t rows = 0;
  uint64_t runs = 0;
  uint64_t merge_passes = 0;
};

// Sorts a delimited file into out_path. profile must describe in_path.
SortReport sort_table_file(const std::string& in_path, const std::string& out_path,
                           const TableProfile& profile, const SortPlan& plan,
                           const SortOptions& options = {});

}  // namespace ewahidx
