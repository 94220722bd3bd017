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
// File: query.hpp
// -----------------------------------------------------------------------------
//
// Multi-bitmap aggregation and equality / range queries.
//
// Aggregation strategies (all zero-extend shorter inputs):
//
//   generic    walks every input in lockstep; each step scans all L cursors
//              for the nearest run end. O(L sum |B_i|).
//   two-heap   keeps run starts in a max-heap and run ends in a min-heap,
//              with a table from input to heap slot, and tracks how many
//              inputs sit in a ones run. O(sum |B_i| log L).
//   pairwise   folds the inputs two at a time in increasing compressed size.
//              An AND stops as soon as the partial result is empty.
//   in-place   aggregates into an uncompressed buffer of the result length,
//              skipping clean runs that leave it unchanged, then compresses.
//
// A query is a conjunction of per-column predicates. An equality predicate
// ANDs the k bitmaps of the value's code; a range predicate ORs the bitmaps
// of every value in [lo, hi] (k = 1 columns only). Each block is evaluated
// independently and the row ids are concatenated.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ewahidx/ewah.hpp"
#include "ewahidx/index.hpp"

namespace ewahidx {

enum class AggOp : uint8_t { And, Or, Xor };

enum class Strategy : uint8_t { Auto, Generic, TwoHeap, Pairwise, InPlace };

std::string_view strategy_name(Strategy s);
// auto | generic | two-heap | pairwise | in-place
Strategy parse_strategy(std::string_view text);

struct AggregateOptions {
  Strategy strategy = Strategy::Auto;
  // Auto uses pairwise up to this many inputs and two-heap above it.
  size_t pairwise_max_inputs = 8;
  // Largest uncompressed buffer the in-place strategy may allocate.
  uint64_t inplace_max_bytes = uint64_t{1} << 30;
};

// Inputs must share word parameters; an empty list is an InvalidArgument.
CompressedBitmap aggregate_generic(std::span<const CompressedBitmap> inputs, AggOp op);
CompressedBitmap aggregate_two_heap(std::span<const CompressedBitmap> inputs, AggOp op);
CompressedBitmap aggregate_pairwise(std::span<const CompressedBitmap> inputs, AggOp op);
CompressedBitmap aggregate_inplace(std::span<const CompressedBitmap> inputs, AggOp op,
                                   uint64_t max_bytes = uint64_t{1} << 30);

Strategy resolve_strategy(size_t inputs, const AggregateOptions& options);
CompressedBitmap aggregate(std::span<const CompressedBitmap> inputs, AggOp op,
                           const AggregateOptions& options = {});

struct Predicate {
  enum class Kind : uint8_t { Equals, Range };
  // 0-based.
  uint32_t column = 0;
  Kind kind = Kind::Equals;
  std::string value;
  // Range bounds, inclusive; nullopt leaves that side open.
  std::optional<std::string> lo;
  std::optional<std::string> hi;

  static Predicate equals(uint32_t column, std::string value);
  static Predicate range(uint32_t column, std::optional<std::string> lo,
                         std::optional<std::string> hi);
};

struct Query {
  std::vector<Predicate> predicates;

  // "col<N>=value" or "col<N>=lo..hi" terms joined by '&'; N is 1-based and
  // the "col" prefix is optional. Either range bound may be empty.
  static Query parse(std::string_view text);
};

enum class QueryStatus : uint8_t {
  Ok,
  // An equality predicate names a value absent from the dictionary.
  UnknownValue,
  // A range predicate covers no dictionary value.
  EmptyRange,
};

std::string_view status_name(QueryStatus s);

struct QueryOptions {
  AggregateOptions aggregate;
  // Predicates of one block are evaluated on up to this many threads.
  unsigned threads = 1;
};

struct QueryResult {
  std::vector<uint64_t> rows;
  QueryStatus status = QueryStatus::Ok;
  uint64_t bitmaps_loaded = 0;
  // Compressed words of every loaded bitmap.
  uint64_t words_scanned = 0;
};

// Where query bitmaps come from: an index file or in-memory blocks.
class IndexSource {
 public:
  virtual ~IndexSource() = default;
  virtual const IndexHeader& header() const = 0;
  virtual size_t block_count() const = 0;
  virtual uint64_t block_row_start(size_t block) const = 0;
  virtual uint64_t block_row_count(size_t block) const = 0;
  virtual CompressedBitmap load(size_t block, uint32_t bitmap) const = 0;
};

class FileIndexSource : public IndexSource {
 public:
  explicit FileIndexSource(const IndexReader& reader) : reader_(reader) {}
  const IndexHeader& header() const override { return reader_.header(); }
  size_t block_count() const override { return reader_.block_count(); }
  uint64_t block_row_start(size_t b) const override { return reader_.block(b).row_start; }
  uint64_t block_row_count(size_t b) const override { return reader_.block(b).row_count; }
  CompressedBitmap load(size_t b, uint32_t id) const override { return reader_.load_bitmap(b, id); }

 private:
  const IndexReader& reader_;
};

class MemoryIndexSource : public IndexSource {
 public:
  MemoryIndexSource(const IndexHeader& header, std::span<const IndexBlock> blocks)
      : header_(header), blocks_(blocks) {}
  const IndexHeader& header() const override { return header_; }
  size_t block_count() const override { return blocks_.size(); }
  uint64_t block_row_start(size_t b) const override { return blocks_[b].row_start; }
  uint64_t block_row_count(size_t b) const override { return blocks_[b].row_count; }
  CompressedBitmap load(size_t b, uint32_t id) const override { return blocks_[b].bitmaps[id]; }

 private:
  const IndexHeader& header_;
  std::span<const IndexBlock> blocks_;
};

// Dictionary ranks of column values in [lo, hi], in the column's value
// order (numeric columns compare numerically).
std::vector<uint32_t> ranks_in_range(const ColumnCoding& column,
                                     const std::optional<std::string>& lo,
                                     const std::optional<std::string>& hi);

QueryResult run_query(const IndexSource& index, const Query& query,
                      const QueryOptions& options = {});
QueryResult equality_query(const IndexSource& index, uint32_t column, std::string_view value,
                           const QueryOptions& options = {});
QueryResult range_query(const IndexSource& index, std::span<const Predicate> ranges,
                        const QueryOptions& options = {});

}  // namespace ewahidx
