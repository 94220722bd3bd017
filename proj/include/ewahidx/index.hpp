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
// File: index.hpp
// -----------------------------------------------------------------------------
//
// k-of-N bitmap indexes: streaming construction, the on-disk format and a
// random-access reader.
//
// Bitmaps are numbered globally: column 0 owns ids [0, N_0), column 1 owns
// [N_0, N_0 + N_1), and so on. Code position p of column c is bitmap
// bitmap_base(c) + p - 1.
//
// The table is split horizontally into blocks; each block holds every bitmap
// restricted to its row range. A block is closed at a word boundary once its
// compressed bitmaps reach the memory budget.
//
// File layout (all integers little-endian):
//
//   header   "EWAHIDX\0" | version u8 | w u8 | reserved u16 | columns u32
//            per column:
//              k u32 | N u32 | scheme u8 | numeric u8 | reserved u16 |
//              seed u64 | cardinality u32
//              dictionary, in rank order: shared-prefix length u32 |
//                suffix length u32 | suffix bytes
//              codes, in rank order: k positions u32 each (1-based)
//            header crc32 u32
//   block    row_start u64 | row_count u32 | bitmap count u32 |
//            offsets u32[bitmap count] (from the start of the block) |
//            crc32 u32 of the fields above |
//            per bitmap: word count u32 | words (w/8 bytes each)
//   footer   block count u64 | per block: file offset u64 | row_start u64 |
//            row_count u32 | total rows u64 | crc32 u32 of the footer fields |
//            footer offset u64 | "EWAHEND\0"

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ewahidx/codec.hpp"
#include "ewahidx/ewah.hpp"
#include "ewahidx/table.hpp"

namespace ewahidx {

inline constexpr uint8_t kIndexFormatVersion = 1;
inline constexpr uint64_t kDefaultBudgetBytes = uint64_t{256} << 20;

struct ColumnCoding {
  uint32_t k = 1;
  uint32_t N = 0;
  Scheme scheme = Scheme::GrayLex;
  uint64_t seed = 0;
  bool numeric = false;
  Dictionary dict;
  // codes[r] belongs to the value of rank r.
  std::vector<Code> codes;

  uint64_t cardinality() const { return dict.size(); }
};

struct IndexHeader {
  unsigned w = 32;
  std::vector<ColumnCoding> columns;

  WordParams params() const { return WordParams::of(w); }
  uint32_t bitmap_count() const;
  uint32_t bitmap_base(size_t column) const;
  // Column owning a global bitmap id.
  size_t column_of(uint32_t bitmap) const;
};

struct CodingOptions {
  uint32_t k = 1;
  unsigned w = 32;
  Scheme scheme = Scheme::GrayLex;
  uint64_t seed = 0;
  // Sort-column order for the alternating Gray-Lex parity; empty = identity.
  std::vector<uint32_t> column_order;
};

// Picks effective k and N per column (profile.configure) and allocates codes.
IndexHeader make_header(const TableProfile& profile, const CodingOptions& options);

struct IndexBlock {
  uint64_t row_start = 0;
  uint64_t row_count = 0;
  // Indexed by global bitmap id; every bitmap has bit_length row_count.
  std::vector<CompressedBitmap> bitmaps;
};

using BlockSink = std::function<void(IndexBlock&&)>;

// Streaming builder. For each row, the k bitmaps of every column's code get
// the row's bit in a pending word; every w rows the bitmaps touched since the
// last boundary are brought up to date (catch-up zero words, then the pending
// word) and all others are left alone, so the work is proportional to the
// index size rather than rows times bitmaps.
class IndexBuilder {
 public:
  IndexBuilder(const IndexHeader& header, uint64_t budget_bytes, BlockSink sink);

  // ranks[c] is the dictionary rank of the row's value in column c.
  void add_row(std::span<const uint32_t> ranks);
  // Emits the final (partial) block, if any rows are pending.
  void finish();

  uint64_t rows() const { return row_start_ + rows_in_block_; }

 private:
  void flush_word(uint64_t word_index);
  void close_block();
  void reset_block();

  const IndexHeader& header_;
  WordParams params_;
  uint64_t budget_bytes_;
  BlockSink sink_;
  std::vector<uint32_t> base_;
  std::vector<CompressedBitmap> bitmaps_;
  std::vector<uint64_t> pending_;
  std::vector<uint8_t> in_dirtied_;
  std::vector<uint32_t> dirtied_;
  uint64_t row_start_ = 0;
  uint64_t rows_in_block_ = 0;
  uint64_t block_words_ = 0;
};

std::vector<IndexBlock> build_blocks(const EncodedTable& table, const IndexHeader& header,
                                     uint64_t budget_bytes = kDefaultBudgetBytes);

class IndexWriter {
 public:
  IndexWriter(const std::string& path, const IndexHeader& header);
  void write_block(const IndexBlock& block);
  void close();

 private:
  struct DirEntry {
    uint64_t offset;
    uint64_t row_start;
    uint32_t row_count;
  };
  void write(std::span<const uint8_t> bytes);

  std::string path_;
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file_;
  IndexHeader header_;
  uint64_t offset_ = 0;
  uint64_t rows_ = 0;
  std::vector<DirEntry> directory_;
};

struct BuildReport {
  uint64_t rows = 0;
  uint64_t blocks = 0;
  uint64_t bitmaps = 0;
};

// Reads a delimited table (described by profile) and writes its index.
BuildReport build_index_file(const std::string& table_path, const std::string& index_path,
                             const TableProfile& profile, const IndexHeader& header,
                             uint64_t budget_bytes = kDefaultBudgetBytes);

struct BlockInfo {
  uint64_t offset = 0;
  uint64_t row_start = 0;
  uint64_t row_count = 0;
};

// Random access to a finished index file. load_bitmap reads only the block's
// offset table and the requested bitmap; concurrent calls are safe.
class IndexReader {
 public:
  explicit IndexReader(const std::string& path);
  ~IndexReader();
  IndexReader(const IndexReader&) = delete;
  IndexReader& operator=(const IndexReader&) = delete;

  const IndexHeader& header() const { return header_; }
  uint64_t rows() const { return rows_; }
  size_t block_count() const { return blocks_.size(); }
  const BlockInfo& block(size_t i) const { return blocks_[i]; }

  std::vector<uint32_t> offsets(size_t block) const;
  CompressedBitmap load_bitmap(size_t block, uint32_t bitmap) const;
  IndexBlock load_block(size_t block) const;

 private:
  void read_at(uint64_t offset, std::span<uint8_t> out) const;
  const std::vector<uint32_t>& cached_offsets(size_t block) const;

  std::string path_;
  int fd_ = -1;
  uint64_t file_size_ = 0;
  IndexHeader header_;
  uint64_t rows_ = 0;
  std::vector<BlockInfo> blocks_;
  mutable std::mutex mutex_;
  mutable std::vector<std::optional<std::vector<uint32_t>>> offset_cache_;
};

struct IndexStats {
  BitmapStats total;
  std::vector<BitmapStats> per_column;
  uint64_t rows = 0;
  uint64_t blocks = 0;
  uint64_t bitmaps = 0;
};

IndexStats index_stats(const IndexHeader& header, std::span<const IndexBlock> blocks);
IndexStats index_stats(const IndexReader& reader);

}  // namespace ewahidx
