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

#include "ewahidx/index.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>

#include "bytes.hpp"
#include "ewahidx/error.hpp"

namespace ewahidx {
namespace {

constexpr char kMagic[8] = {'E', 'W', 'A', 'H', 'I', 'D', 'X', '\0'};
constexpr char kTailMagic[8] = {'E', 'W', 'A', 'H', 'E', 'N', 'D', '\0'};
constexpr size_t kTailBytes = 16;
// Bytes before the offset table: row_start, row_count, bitmap count.
constexpr size_t kBlockFixedBytes = 16;
// Block rows must fit the u32 row_count; a multiple of 64 keeps every w
// aligned.
constexpr uint64_t kMaxBlockRows = (uint64_t{1} << 32) - 64;
// Leaves room under the 4 GiB offset limit for the last word boundary's
// growth, which is bounded by two words per bitmap.
constexpr uint64_t kMaxBudgetBytes = uint64_t{3} << 30;

std::string_view as_view(const char (&m)[8]) { return {m, 8}; }

void write_header(detail::ByteWriter& out, const IndexHeader& h) {
  out.raw(as_view(kMagic));
  out.u8(kIndexFormatVersion);
  out.u8(static_cast<uint8_t>(h.w));
  out.u16(0);
  out.u32(static_cast<uint32_t>(h.columns.size()));
  for (const auto& c : h.columns) {
    out.u32(c.k);
    out.u32(c.N);
    out.u8(static_cast<uint8_t>(c.scheme));
    out.u8(c.numeric ? 1 : 0);
    out.u16(0);
    out.u64(c.seed);
    out.u32(static_cast<uint32_t>(c.dict.size()));
    std::string_view prev;
    for (const auto& v : c.dict.values) {
      const size_t limit = std::min(prev.size(), v.size());
      size_t shared = 0;
      while (shared < limit && prev[shared] == v[shared]) ++shared;
      out.u32(static_cast<uint32_t>(shared));
      out.u32(static_cast<uint32_t>(v.size() - shared));
      out.raw(std::string_view(v).substr(shared));
      prev = v;
    }
    for (const auto& code : c.codes) {
      for (uint32_t p : code) out.u32(p);
    }
  }
  out.u32(detail::crc32_of(out.bytes()));
}

IndexHeader read_header(std::span<const uint8_t> bytes, const std::string& path) {
  if (bytes.size() < 4) throw DataError(path + ": index header truncated");
  const auto body = bytes.first(bytes.size() - 4);
  detail::ByteReader crc_reader(bytes.subspan(bytes.size() - 4), path);
  if (crc_reader.u32() != detail::crc32_of(body)) {
    throw DataError(path + ": index header checksum mismatch");
  }
  detail::ByteReader in(body, path + ": index header");
  if (in.raw(8) != as_view(kMagic)) throw DataError(path + ": not an ewahidx index");
  const uint8_t version = in.u8();
  if (version != kIndexFormatVersion) {
    throw DataError(path + ": unsupported index format version " + std::to_string(version));
  }
  IndexHeader h;
  h.w = in.u8();
  if (h.w != 16 && h.w != 32 && h.w != 64) throw DataError(path + ": bad word size");
  in.u16();
  const uint32_t columns = in.u32();
  for (uint32_t ci = 0; ci < columns; ++ci) {
    ColumnCoding c;
    c.k = in.u32();
    c.N = in.u32();
    const uint8_t scheme = in.u8();
    if (scheme > static_cast<uint8_t>(Scheme::GrayFrequency)) {
      throw DataError(path + ": bad scheme tag");
    }
    c.scheme = static_cast<Scheme>(scheme);
    c.numeric = in.u8() != 0;
    in.u16();
    c.seed = in.u64();
    const uint32_t card = in.u32();
    if (card > 0 && (c.k == 0 || c.k > c.N || binomial(c.N, c.k) < card)) {
      throw DataError(path + ": column " + std::to_string(ci) + " has too few codes");
    }
    std::string prev;
    c.dict.values.reserve(card);
    for (uint32_t r = 0; r < card; ++r) {
      const uint32_t shared = in.u32();
      const uint32_t suffix = in.u32();
      if (shared > prev.size()) throw DataError(path + ": bad dictionary prefix");
      std::string v = prev.substr(0, shared);
      v += in.raw(suffix);
      c.dict.values.push_back(v);
      prev = std::move(v);
    }
    c.dict.reindex();
    if (c.dict.distinct() != card) throw DataError(path + ": duplicate dictionary value");
    c.codes.resize(card);
    for (auto& code : c.codes) {
      code.resize(c.k);
      for (auto& p : code) p = in.u32();
      for (uint32_t j = 0; j < c.k; ++j) {
        if (code[j] < 1 || code[j] > c.N || (j > 0 && code[j] <= code[j - 1])) {
          throw DataError(path + ": bad code in column " + std::to_string(ci));
        }
      }
    }
    h.columns.push_back(std::move(c));
  }
  if (in.remaining() != 0) throw DataError(path + ": trailing bytes in index header");
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// IndexHeader

uint32_t IndexHeader::bitmap_count() const {
  uint64_t total = 0;
  for (const auto& c : columns) total += c.N;
  if (total > UINT32_MAX) throw InvalidArgument("too many bitmaps");
  return static_cast<uint32_t>(total);
}

uint32_t IndexHeader::bitmap_base(size_t column) const {
  uint32_t base = 0;
  for (size_t c = 0; c < column; ++c) base += columns[c].N;
  return base;
}

size_t IndexHeader::column_of(uint32_t bitmap) const {
  for (size_t c = 0; c < columns.size(); ++c) {
    if (bitmap < columns[c].N) return c;
    bitmap -= columns[c].N;
  }
  throw InvalidArgument("bitmap id out of range");
}

IndexHeader make_header(const TableProfile& profile, const CodingOptions& options) {
  if (options.k < 1) throw InvalidArgument("k must be at least 1");
  TableProfile p = profile;
  p.configure(options.k);
  const size_t cols = p.column_count();

  std::vector<uint32_t> order = options.column_order;
  if (order.empty()) {
    order.resize(cols);
    for (size_t c = 0; c < cols; ++c) order[c] = static_cast<uint32_t>(c);
  }
  std::vector<uint8_t> seen(cols, 0);
  for (uint32_t c : order) {
    if (c >= cols || seen[c]) throw InvalidArgument("column order is not a permutation");
    seen[c] = 1;
  }
  if (order.size() != cols) throw InvalidArgument("column order is not a permutation");

  IndexHeader h;
  h.w = WordParams::of(options.w).bits();
  h.columns.resize(cols);
  uint64_t k_sum = 0;
  for (uint32_t c : order) {
    const ColumnProfile& col = p.columns[c];
    ColumnCoding& out = h.columns[c];
    out.k = col.k;
    out.N = col.N;
    out.scheme = options.scheme;
    out.seed = options.seed + c;
    out.numeric = col.numeric;
    out.dict = col.dict;
    if (col.cardinality() > 0) {
      AllocateOptions ao;
      ao.seed = out.seed;
      ao.preceding_k_sum = k_sum;
      out.codes = allocate(options.scheme, col.k, col.N, col.frequencies, ao).codes;
    }
    k_sum += col.k;
  }
  h.bitmap_count();
  return h;
}

// ---------------------------------------------------------------------------
// IndexBuilder

IndexBuilder::IndexBuilder(const IndexHeader& header, uint64_t budget_bytes, BlockSink sink)
    : header_(header), params_(header.params()), budget_bytes_(budget_bytes),
      sink_(std::move(sink)) {
  if (budget_bytes_ == 0 || budget_bytes_ > kMaxBudgetBytes) {
    throw InvalidArgument("memory budget must be between 1 byte and 3 GiB");
  }
  const uint32_t total = header.bitmap_count();
  for (size_t c = 0; c < header.columns.size(); ++c) {
    base_.push_back(header.bitmap_base(c));
  }
  pending_.assign(total, 0);
  in_dirtied_.assign(total, 0);
  reset_block();
}

void IndexBuilder::reset_block() {
  bitmaps_.assign(pending_.size(), CompressedBitmap(params_));
  rows_in_block_ = 0;
  block_words_ = 0;
}

void IndexBuilder::add_row(std::span<const uint32_t> ranks) {
  if (ranks.size() != header_.columns.size()) {
    throw DataError("row has " + std::to_string(ranks.size()) + " fields, index has " +
                    std::to_string(header_.columns.size()) + " columns");
  }
  const uint64_t bit = uint64_t{1} << (rows_in_block_ % params_.bits());
  for (size_t c = 0; c < ranks.size(); ++c) {
    const ColumnCoding& col = header_.columns[c];
    if (ranks[c] >= col.codes.size()) {
      throw DataError("value rank " + std::to_string(ranks[c]) + " has no code in column " +
                      std::to_string(c));
    }
    for (uint32_t p : col.codes[ranks[c]]) {
      const uint32_t id = base_[c] + p - 1;
      pending_[id] |= bit;
      if (!in_dirtied_[id]) {
        in_dirtied_[id] = 1;
        dirtied_.push_back(id);
      }
    }
  }
  ++rows_in_block_;
  if (rows_in_block_ % params_.bits() == 0) {
    flush_word(rows_in_block_ / params_.bits() - 1);
    if (block_words_ * params_.bytes() >= budget_bytes_ || rows_in_block_ >= kMaxBlockRows) {
      close_block();
    }
  }
}

// Writes pending word number word_index (0-based within the block) of every
// dirtied bitmap. A bitmap last touched at word j holds j + 1 logical words,
// so it needs word_index - (j + 1) zero words first; logical_words() is that
// j + 1 directly, which is where the pseudocode's "- 1" goes.
void IndexBuilder::flush_word(uint64_t word_index) {
  for (uint32_t id : dirtied_) {
    CompressedBitmap& b = bitmaps_[id];
    const size_t before = b.size_in_words();
    b.add_clean_words(false, word_index - b.logical_words());
    b.add_word(pending_[id]);
    block_words_ += b.size_in_words() - before;
    pending_[id] = 0;
    in_dirtied_[id] = 0;
  }
  dirtied_.clear();
}

void IndexBuilder::close_block() {
  if (rows_in_block_ == 0) return;
  const unsigned w = params_.bits();
  if (rows_in_block_ % w != 0) flush_word(rows_in_block_ / w);
  const uint64_t words = (rows_in_block_ + w - 1) / w;
  for (auto& b : bitmaps_) {
    b.add_clean_words(false, words - b.logical_words());
    b.finish(rows_in_block_);
  }
  IndexBlock block;
  block.row_start = row_start_;
  block.row_count = rows_in_block_;
  block.bitmaps = std::move(bitmaps_);
  row_start_ += rows_in_block_;
  reset_block();
  sink_(std::move(block));
}

void IndexBuilder::finish() { close_block(); }

std::vector<IndexBlock> build_blocks(const EncodedTable& table, const IndexHeader& header,
                                     uint64_t budget_bytes) {
  std::vector<IndexBlock> blocks;
  IndexBuilder b(header, budget_bytes, [&](IndexBlock&& blk) { blocks.push_back(std::move(blk)); });
  for (uint64_t r = 0; r < table.rows; ++r) b.add_row(table.row(r));
  b.finish();
  return blocks;
}

// ---------------------------------------------------------------------------
// IndexWriter

IndexWriter::IndexWriter(const std::string& path, const IndexHeader& header)
    : path_(path), file_(std::fopen(path.c_str(), "wb"), &std::fclose), header_(header) {
  if (!file_) throw IoError("cannot create " + path + ": " + std::strerror(errno));
  detail::ByteWriter out;
  write_header(out, header_);
  write(out.bytes());
}

void IndexWriter::write(std::span<const uint8_t> bytes) {
  if (!file_) throw IoError(path_ + ": write after close");
  if (!bytes.empty() && std::fwrite(bytes.data(), 1, bytes.size(), file_.get()) != bytes.size()) {
    throw IoError("write to " + path_ + " failed: " + std::strerror(errno));
  }
  offset_ += bytes.size();
}

void IndexWriter::write_block(const IndexBlock& block) {
  const uint32_t count = header_.bitmap_count();
  if (block.bitmaps.size() != count) throw InvalidArgument("block has the wrong bitmap count");
  if (block.row_start != rows_) throw InvalidArgument("blocks must be contiguous");
  if (block.row_count == 0 || block.row_count > UINT32_MAX) {
    throw InvalidArgument("bad block row count");
  }
  const unsigned wb = header_.params().bytes();

  detail::ByteWriter head;
  head.u64(block.row_start);
  head.u32(static_cast<uint32_t>(block.row_count));
  head.u32(count);
  uint64_t at = kBlockFixedBytes + 4 * uint64_t{count} + 4;
  for (const auto& b : block.bitmaps) {
    if (b.params() != header_.params() || b.bit_length() != block.row_count) {
      throw InvalidArgument("bitmap does not match its block");
    }
    if (at > UINT32_MAX) throw InvalidArgument("block exceeds the 4 GiB offset range");
    head.u32(static_cast<uint32_t>(at));
    at += 4 + uint64_t{b.size_in_words()} * wb;
  }
  head.u32(detail::crc32_of(head.bytes()));

  directory_.push_back({offset_, block.row_start, static_cast<uint32_t>(block.row_count)});
  write(head.bytes());
  for (const auto& b : block.bitmaps) {
    detail::ByteWriter body;
    body.u32(static_cast<uint32_t>(b.size_in_words()));
    for (uint64_t word : b.words()) body.word(word, wb);
    write(body.bytes());
  }
  rows_ += block.row_count;
}

void IndexWriter::close() {
  if (!file_) return;
  detail::ByteWriter footer;
  footer.u64(directory_.size());
  for (const auto& d : directory_) {
    footer.u64(d.offset);
    footer.u64(d.row_start);
    footer.u32(d.row_count);
  }
  footer.u64(rows_);
  footer.u32(detail::crc32_of(footer.bytes()));
  const uint64_t footer_offset = offset_;
  footer.u64(footer_offset);
  footer.raw(as_view(kTailMagic));
  write(footer.bytes());
  std::FILE* f = file_.release();
  if (std::fclose(f) != 0) throw IoError("closing " + path_ + " failed: " + std::strerror(errno));
}

BuildReport build_index_file(const std::string& table_path, const std::string& index_path,
                             const TableProfile& profile, const IndexHeader& header,
                             uint64_t budget_bytes) {
  if (profile.column_count() != header.columns.size()) {
    throw InvalidArgument("profile and index header disagree on the column count");
  }
  IndexWriter writer(index_path, header);
  BuildReport report;
  report.bitmaps = header.bitmap_count();
  IndexBuilder builder(header, budget_bytes, [&](IndexBlock&& b) {
    writer.write_block(b);
    ++report.blocks;
  });

  TableReader reader(table_path, profile.delimiter);
  std::vector<std::string_view> fields;
  std::vector<uint32_t> ranks(header.columns.size());
  while (reader.next(fields)) {
    if (fields.size() != ranks.size()) {
      throw DataError(table_path + ":" + std::to_string(reader.line()) + ": expected " +
                      std::to_string(ranks.size()) + " fields");
    }
    for (size_t c = 0; c < fields.size(); ++c) {
      const auto r = header.columns[c].dict.rank(fields[c]);
      if (!r) {
        throw DataError(table_path + ":" + std::to_string(reader.line()) + ": value '" +
                        std::string(fields[c]) + "' is not in the dictionary of column " +
                        std::to_string(c + 1));
      }
      ranks[c] = *r;
    }
    builder.add_row(ranks);
  }
  builder.finish();
  writer.close();
  report.rows = builder.rows();
  return report;
}

// ---------------------------------------------------------------------------
// IndexReader

IndexReader::IndexReader(const std::string& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd_ < 0) throw IoError("cannot open " + path + ": " + std::strerror(errno));
  try {
    struct stat st {};
    if (::fstat(fd_, &st) != 0) throw IoError("cannot stat " + path + ": " + std::strerror(errno));
    file_size_ = static_cast<uint64_t>(st.st_size);
    if (file_size_ < kTailBytes) throw DataError(path + ": index file truncated");

    uint8_t tail[kTailBytes];
    read_at(file_size_ - kTailBytes, tail);
    if (std::memcmp(tail + 8, kTailMagic, 8) != 0) {
      throw DataError(path + ": missing index trailer (truncated or not an index)");
    }
    detail::ByteReader tr(std::span<const uint8_t>(tail, 8), path);
    const uint64_t footer_offset = tr.u64();
    if (footer_offset > file_size_ - kTailBytes) throw DataError(path + ": bad footer offset");

    std::vector<uint8_t> footer(file_size_ - kTailBytes - footer_offset);
    read_at(footer_offset, footer);
    if (footer.size() < 4) throw DataError(path + ": footer truncated");
    const auto body = std::span<const uint8_t>(footer).first(footer.size() - 4);
    detail::ByteReader crc(std::span<const uint8_t>(footer).subspan(footer.size() - 4), path);
    if (crc.u32() != detail::crc32_of(body)) throw DataError(path + ": footer checksum mismatch");
    detail::ByteReader in(body, path + ": footer");
    const uint64_t count = in.u64();
    if (count > in.remaining() / 20) throw DataError(path + ": bad block count");
    uint64_t next_row = 0;
    for (uint64_t i = 0; i < count; ++i) {
      BlockInfo b;
      b.offset = in.u64();
      b.row_start = in.u64();
      b.row_count = in.u32();
      if (b.row_start != next_row || b.row_count == 0 ||
          (i > 0 && b.offset <= blocks_.back().offset) || b.offset >= footer_offset) {
        throw DataError(path + ": inconsistent block directory");
      }
      next_row += b.row_count;
      blocks_.push_back(b);
    }
    rows_ = in.u64();
    if (rows_ != next_row || in.remaining() != 0) throw DataError(path + ": inconsistent footer");

    const uint64_t header_end = blocks_.empty() ? footer_offset : blocks_.front().offset;
    std::vector<uint8_t> header(header_end);
    read_at(0, header);
    header_ = read_header(header, path);
    offset_cache_.resize(blocks_.size());
  } catch (...) {
    ::close(fd_);
    throw;
  }
}

IndexReader::~IndexReader() {
  if (fd_ >= 0) ::close(fd_);
}

void IndexReader::read_at(uint64_t offset, std::span<uint8_t> out) const {
  size_t done = 0;
  while (done < out.size()) {
    const ssize_t n = ::pread(fd_, out.data() + done, out.size() - done,
                              static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("read from " + path_ + " failed: " + std::strerror(errno));
    }
    if (n == 0) throw DataError(path_ + ": unexpected end of file");
    done += static_cast<size_t>(n);
  }
}

const std::vector<uint32_t>& IndexReader::cached_offsets(size_t block) const {
  if (block >= blocks_.size()) throw InvalidArgument("block index out of range");
  {
    std::lock_guard lock(mutex_);
    if (offset_cache_[block]) return *offset_cache_[block];
  }
  const BlockInfo& info = blocks_[block];
  const uint32_t count = header_.bitmap_count();
  const uint64_t block_end =
      block + 1 < blocks_.size() ? blocks_[block + 1].offset : file_size_ - kTailBytes;
  const uint64_t head_size = kBlockFixedBytes + 4 * uint64_t{count} + 4;
  if (info.offset + head_size > block_end) throw DataError(path_ + ": block header truncated");
  std::vector<uint8_t> head(head_size);
  read_at(info.offset, head);
  const auto body = std::span<const uint8_t>(head).first(head_size - 4);
  detail::ByteReader crc(std::span<const uint8_t>(head).subspan(head_size - 4), path_);
  if (crc.u32() != detail::crc32_of(body)) {
    throw DataError(path_ + ": offset table checksum mismatch in block " + std::to_string(block));
  }
  detail::ByteReader in(body, path_);
  if (in.u64() != info.row_start || in.u32() != info.row_count || in.u32() != count) {
    throw DataError(path_ + ": block " + std::to_string(block) + " disagrees with the directory");
  }
  std::vector<uint32_t> offsets(count);
  uint64_t prev = head_size;
  for (uint32_t i = 0; i < count; ++i) {
    offsets[i] = in.u32();
    if (offsets[i] < prev || info.offset + offsets[i] + 4 > block_end) {
      throw DataError(path_ + ": bad offset table in block " + std::to_string(block));
    }
    prev = uint64_t{offsets[i]} + 4;
  }
  std::lock_guard lock(mutex_);
  if (!offset_cache_[block]) offset_cache_[block] = std::move(offsets);
  return *offset_cache_[block];
}

std::vector<uint32_t> IndexReader::offsets(size_t block) const { return cached_offsets(block); }

CompressedBitmap IndexReader::load_bitmap(size_t block, uint32_t bitmap) const {
  const auto& offs = cached_offsets(block);
  if (bitmap >= offs.size()) throw InvalidArgument("bitmap id out of range");
  const BlockInfo& info = blocks_[block];
  const uint64_t block_end =
      block + 1 < blocks_.size() ? blocks_[block + 1].offset : file_size_ - kTailBytes;
  const uint64_t start = info.offset + offs[bitmap];
  const uint64_t end = bitmap + 1 < offs.size() ? info.offset + offs[bitmap + 1] : block_end;
  const WordParams params = header_.params();

  uint8_t len_bytes[4];
  read_at(start, len_bytes);
  const uint32_t words = detail::ByteReader(len_bytes, path_).u32();
  const uint64_t size = 4 + uint64_t{words} * params.bytes();
  // The last bitmap of the last block is followed by the footer.
  if (start + size > end || (bitmap + 1 < offs.size() && start + size != end)) {
    throw DataError(path_ + ": bitmap " + std::to_string(bitmap) + " overruns its slot");
  }
  std::vector<uint8_t> raw(size - 4);
  read_at(start + 4, raw);
  detail::ByteReader in(raw, path_);
  std::vector<uint64_t> stream(words);
  for (auto& w : stream) w = in.word(params.bytes());
  return CompressedBitmap::from_stream(params, std::move(stream), info.row_count);
}

IndexBlock IndexReader::load_block(size_t block) const {
  IndexBlock out;
  out.row_start = blocks_.at(block).row_start;
  out.row_count = blocks_[block].row_count;
  const uint32_t count = header_.bitmap_count();
  out.bitmaps.reserve(count);
  for (uint32_t i = 0; i < count; ++i) out.bitmaps.push_back(load_bitmap(block, i));
  return out;
}

// ---------------------------------------------------------------------------
// Stats

IndexStats index_stats(const IndexHeader& header, std::span<const IndexBlock> blocks) {
  IndexStats s;
  s.per_column.resize(header.columns.size());
  s.bitmaps = header.bitmap_count();
  s.blocks = blocks.size();
  for (const auto& b : blocks) {
    s.rows += b.row_count;
    size_t column = 0;
    uint32_t column_end = header.columns.empty() ? 0 : header.columns[0].N;
    for (uint32_t id = 0; id < b.bitmaps.size(); ++id) {
      while (id >= column_end) column_end += header.columns[++column].N;
      const BitmapStats bs = b.bitmaps[id].stats();
      s.per_column[column] += bs;
      s.total += bs;
    }
  }
  return s;
}

IndexStats index_stats(const IndexReader& reader) {
  IndexStats s;
  const IndexHeader& header = reader.header();
  s.per_column.resize(header.columns.size());
  s.bitmaps = header.bitmap_count();
  s.blocks = reader.block_count();
  s.rows = reader.rows();
  for (size_t blk = 0; blk < reader.block_count(); ++blk) {
    for (uint32_t id = 0; id < s.bitmaps; ++id) {
      const BitmapStats bs = reader.load_bitmap(blk, id).stats();
      s.per_column[header.column_of(id)] += bs;
      s.total += bs;
    }
  }
  return s;
}

}  // namespace ewahidx
