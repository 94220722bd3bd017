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

#include "ewahidx/ewah.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace ewahidx {
namespace {

uint64_t low_bits(unsigned n) {
  return n >= 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
}

// A clean run with count 0 carries no fill; keep its bit at zero so streams
// are byte-identical however they were produced.
uint64_t pack_marker(const WordParams& p, bool fill, uint64_t clean,
                     uint64_t dirty) {
  return p.make_marker(clean > 0 && fill, clean, dirty);
}

enum class Outcome { Zero, One, Copy, Invert };

// Result of op over a word range where one operand is the constant `fill`.
Outcome constant_outcome(BitOp op, bool fill, bool constant_is_left) {
  const bool r0 = constant_is_left ? apply(op, fill, false) : apply(op, false, fill);
  const bool r1 = constant_is_left ? apply(op, fill, true) : apply(op, true, fill);
  if (r0 == r1) return r0 ? Outcome::One : Outcome::Zero;
  return r1 ? Outcome::Copy : Outcome::Invert;
}

// Appends the next n logical words of c to out, optionally inverted.
void copy_words(CompressedBitmap& out, WordCursor& c, uint64_t n, bool invert,
                std::vector<uint64_t>& scratch) {
  const uint64_t full = out.params().full_mask();
  while (n > 0) {
    uint64_t take;
    if (c.clean_left() > 0) {
      take = std::min(n, c.clean_left());
      out.add_clean_words(c.fill() != invert, take);
      c.skip_clean(take);
    } else {
      take = std::min<uint64_t>(n, c.dirty_left());
      const auto src = c.dirty().first(take);
      if (invert) {
        scratch.resize(take);
        simd::invert(src, scratch, full);
        out.add_words(scratch);
      } else {
        out.add_words(src);
      }
      c.skip_dirty(take);
    }
    n -= take;
  }
}

void apply_outcome(Outcome o, CompressedBitmap& out, WordCursor& other,
                   uint64_t n, std::vector<uint64_t>& scratch) {
  switch (o) {
    case Outcome::Zero:
    case Outcome::One:
      out.add_clean_words(o == Outcome::One, n);
      other.skip(n);
      break;
    case Outcome::Copy:
      copy_words(out, other, n, false, scratch);
      break;
    case Outcome::Invert:
      copy_words(out, other, n, true, scratch);
      break;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// BitmapStats

double BitmapStats::overrun_pct() const {
  return clean_run_markers == 0
             ? 0.0
             : 100.0 * static_cast<double>(saturated_clean_counters) /
                   static_cast<double>(clean_run_markers);
}

double BitmapStats::clean_fraction() const {
  return words_total == 0 ? 0.0
                          : static_cast<double>(words_total - dirty_words) /
                                static_cast<double>(words_total);
}

BitmapStats& BitmapStats::operator+=(const BitmapStats& o) {
  words_total += o.words_total;
  dirty_words += o.dirty_words;
  markers += o.markers;
  clean_run_markers += o.clean_run_markers;
  saturated_clean_counters += o.saturated_clean_counters;
  clean_sequences += o.clean_sequences;
  ones_count += o.ones_count;
  return *this;
}

// ---------------------------------------------------------------------------
// CompressedBitmap: construction

void CompressedBitmap::require_aligned() const {
  if (bit_length_ % params_.bits() != 0) {
    throw InvalidArgument("word append after a partial trailing word (length " +
                          std::to_string(bit_length_) + ")");
  }
}

void CompressedBitmap::open_marker() {
  words_.push_back(0);
  last_marker_ = words_.size() - 1;
}

void CompressedBitmap::add_clean_words(bool fill, uint64_t count) {
  if (count == 0) return;
  require_aligned();
  bit_length_ += count * params_.bits();
  if (last_marker_ != kNoMarker) {
    const uint64_t m = words_[last_marker_];
    const uint64_t clean = params_.marker_clean(m);
    if (params_.marker_dirty(m) == 0 &&
        (clean == 0 || WordParams::marker_fill(m) == fill)) {
      const uint64_t take = std::min(count, params_.max_clean_count() - clean);
      words_[last_marker_] = pack_marker(params_, fill, clean + take, 0);
      count -= take;
    }
  }
  while (count > 0) {
    const uint64_t take = std::min(count, params_.max_clean_count());
    words_.push_back(pack_marker(params_, fill, take, 0));
    last_marker_ = words_.size() - 1;
    count -= take;
  }
}

void CompressedBitmap::add_dirty_word(uint64_t word) {
  add_dirty_words(std::span<const uint64_t>(&word, 1));
}

void CompressedBitmap::add_dirty_words(std::span<const uint64_t> words) {
  if (words.empty()) return;
  require_aligned();
  bit_length_ += words.size() * params_.bits();
  const uint64_t max_dirty = params_.max_dirty_count();
  while (!words.empty()) {
    if (last_marker_ == kNoMarker ||
        params_.marker_dirty(words_[last_marker_]) == max_dirty) {
      open_marker();
    }
    const uint64_t m = words_[last_marker_];
    const uint64_t dirty = params_.marker_dirty(m);
    const size_t take = static_cast<size_t>(
        std::min<uint64_t>(words.size(), max_dirty - dirty));
    words_.insert(words_.end(), words.begin(), words.begin() + take);
    words_[last_marker_] =
        pack_marker(params_, WordParams::marker_fill(m),
                    params_.marker_clean(m), dirty + take);
    words = words.subspan(take);
  }
}

void CompressedBitmap::add_word(uint64_t word) {
  if (word == 0) {
    add_clean_words(false, 1);
  } else if (word == params_.full_mask()) {
    add_clean_words(true, 1);
  } else {
    add_dirty_word(word);
  }
}

void CompressedBitmap::add_words(std::span<const uint64_t> words) {
  const uint64_t full = params_.full_mask();
  while (!words.empty()) {
    const size_t dirty = simd::find_clean(words, full);
    add_dirty_words(words.first(dirty));
    if (dirty == words.size()) break;
    words = words.subspan(dirty);
    const uint64_t value = words.front();
    const size_t run = simd::run_length(words, value);
    add_clean_words(value != 0, run);
    words = words.subspan(run);
  }
}

void CompressedBitmap::set_bit(uint64_t pos) {
  if (pos < bit_length_) {
    throw InvalidArgument("set_bit(" + std::to_string(pos) +
                          ") is not past the current length " +
                          std::to_string(bit_length_));
  }
  const unsigned w = params_.bits();
  const uint64_t word_index = pos / w;
  const uint64_t bit = uint64_t{1} << (pos % w);
  const uint64_t materialized = logical_words();
  if (word_index < materialized) {
    // pos lands in the partial trailing word. That word is either the last
    // verbatim word or the tail of a zero run (never a ones run: bits past the
    // length are zero).
    const uint64_t m = words_[last_marker_];
    const uint64_t dirty = params_.marker_dirty(m);
    if (dirty > 0) {
      words_.back() |= bit;
    } else {
      words_[last_marker_] =
          pack_marker(params_, WordParams::marker_fill(m),
                      params_.marker_clean(m) - 1, 1);
      words_.push_back(bit);
    }
  } else {
    bit_length_ = materialized * w;
    add_clean_words(false, word_index - materialized);
    add_dirty_word(bit);
  }
  bit_length_ = pos + 1;
}

void CompressedBitmap::resize(uint64_t bit_length) {
  if (bit_length < bit_length_) {
    throw InvalidArgument("resize cannot shrink a bitmap");
  }
  const unsigned w = params_.bits();
  const uint64_t have = logical_words();
  const uint64_t need = (bit_length + w - 1) / w;
  if (need > have) {
    bit_length_ = have * w;
    add_clean_words(false, need - have);
  }
  bit_length_ = bit_length;
}

void CompressedBitmap::finish(uint64_t bit_length) {
  if (bit_length == bit_length_) return;
  const unsigned w = params_.bits();
  if (bit_length_ % w != 0 || bit_length > bit_length_ ||
      bit_length + w <= bit_length_) {
    throw InvalidArgument("finish(" + std::to_string(bit_length) +
                          ") does not fall in the last appended word");
  }
  const unsigned tail = static_cast<unsigned>(bit_length % w);
  const uint64_t mask = low_bits(tail);
  const uint64_t m = words_[last_marker_];
  const uint64_t clean = params_.marker_clean(m);
  const uint64_t dirty = params_.marker_dirty(m);
  const bool fill = WordParams::marker_fill(m);
  if (dirty > 0) {
    words_.back() &= mask;
    if (words_.back() == 0) {
      words_.pop_back();
      words_[last_marker_] = pack_marker(params_, fill, clean, dirty - 1);
      bit_length_ -= w;
      add_clean_words(false, 1);
    }
  } else if (fill) {
    // A ones run cannot cover padding; peel its last word off as verbatim.
    words_[last_marker_] = pack_marker(params_, fill, clean - 1, 0);
    bit_length_ -= w;
    add_dirty_word(mask);
  }
  bit_length_ = bit_length;
}

CompressedBitmap CompressedBitmap::from_positions(
    WordParams params, std::span<const uint64_t> positions,
    uint64_t bit_length) {
  CompressedBitmap out(params);
  const unsigned w = params.bits();
  uint64_t emitted = 0;  // logical words appended so far
  uint64_t current = 0;
  uint64_t word = 0;
  bool open = false;
  for (size_t i = 0; i < positions.size(); ++i) {
    const uint64_t p = positions[i];
    if (p >= bit_length || (i > 0 && p <= positions[i - 1])) {
      throw InvalidArgument("positions must be ascending, distinct and below "
                            "the bitmap length");
    }
    const uint64_t index = p / w;
    if (open && index != current) {
      out.add_word(word);
      emitted = current + 1;
      word = 0;
      open = false;
    }
    if (!open) {
      out.add_clean_words(false, index - emitted);
      current = index;
      open = true;
    }
    word |= uint64_t{1} << (p % w);
  }
  if (open) {
    out.add_word(word);
    emitted = current + 1;
  }
  out.add_clean_words(false, (bit_length + w - 1) / w - emitted);
  out.finish(bit_length);
  return out;
}

CompressedBitmap CompressedBitmap::from_uncompressed(
    WordParams params, std::span<const uint64_t> words, uint64_t bit_length) {
  const unsigned w = params.bits();
  if (words.size() != (bit_length + w - 1) / w) {
    throw InvalidArgument("uncompressed word count does not match length");
  }
  const uint64_t full = params.full_mask();
  for (uint64_t x : words) {
    if ((x & ~full) != 0) {
      throw InvalidArgument("uncompressed word exceeds the word size");
    }
  }
  CompressedBitmap out(params);
  out.add_words(words);
  out.finish(bit_length);
  return out;
}

CompressedBitmap CompressedBitmap::from_stream(WordParams params,
                                               std::vector<uint64_t> words,
                                               uint64_t bit_length) {
  CompressedBitmap out(params);
  out.words_ = std::move(words);
  out.bit_length_ = bit_length;
  out.validate();
  for (size_t i = 0; i < out.words_.size();) {
    out.last_marker_ = i;
    i += 1 + params.marker_dirty(out.words_[i]);
  }
  return out;
}

void CompressedBitmap::validate() const {
  const uint64_t full = params_.full_mask();
  uint64_t logical = 0;
  size_t last = kNoMarker;
  for (size_t i = 0; i < words_.size();) {
    const uint64_t m = words_[i];
    if ((m & ~full) != 0) {
      throw DataError("marker word " + std::to_string(i) +
                      " exceeds the word size");
    }
    const uint64_t dirty = params_.marker_dirty(m);
    if (i + 1 + dirty > words_.size()) {
      throw DataError("marker word " + std::to_string(i) +
                      " announces more dirty words than the stream holds");
    }
    for (size_t j = i + 1; j <= i + dirty; ++j) {
      if ((words_[j] & ~full) != 0) {
        throw DataError("dirty word " + std::to_string(j) +
                        " exceeds the word size");
      }
    }
    logical += params_.marker_clean(m) + dirty;
    last = i;
    i += 1 + dirty;
  }
  if (logical != logical_words()) {
    throw DataError("stream covers " + std::to_string(logical) +
                    " words but the length needs " +
                    std::to_string(logical_words()));
  }
  const unsigned tail = static_cast<unsigned>(bit_length_ % params_.bits());
  if (tail != 0 && last != kNoMarker) {
    const uint64_t m = words_[last];
    if (params_.marker_dirty(m) > 0) {
      if ((words_.back() & ~low_bits(tail)) != 0) {
        throw DataError("bits set past the bitmap length");
      }
    } else if (WordParams::marker_fill(m)) {
      throw DataError("ones run extends past the bitmap length");
    }
  }
}

// ---------------------------------------------------------------------------
// CompressedBitmap: queries

uint64_t CompressedBitmap::count_ones() const {
  uint64_t ones = 0;
  for (size_t i = 0; i < words_.size();) {
    const uint64_t m = words_[i];
    const uint64_t dirty = params_.marker_dirty(m);
    if (WordParams::marker_fill(m)) {
      ones += params_.marker_clean(m) * params_.bits();
    }
    ones += simd::popcount({words_.data() + i + 1, static_cast<size_t>(dirty)});
    i += 1 + dirty;
  }
  return ones;
}

bool CompressedBitmap::none() const {
  for (size_t i = 0; i < words_.size();) {
    const uint64_t m = words_[i];
    const size_t dirty = static_cast<size_t>(params_.marker_dirty(m));
    if (WordParams::marker_fill(m) && params_.marker_clean(m) > 0) return false;
    const std::span<const uint64_t> literal(words_.data() + i + 1, dirty);
    if (simd::run_length(literal, 0) != dirty) return false;
    i += 1 + dirty;
  }
  return true;
}

std::vector<uint64_t> CompressedBitmap::positions() const {
  std::vector<uint64_t> out;
  const unsigned w = params_.bits();
  uint64_t base = 0;
  for (WordCursor c(*this); !c.done();) {
    if (c.clean_left() > 0) {
      const uint64_t n = c.clean_left();
      if (c.fill()) {
        const uint64_t end = std::min(base + n * w, bit_length_);
        for (uint64_t p = base; p < end; ++p) out.push_back(p);
      }
      base += n * w;
      c.skip_clean(n);
    } else {
      for (uint64_t word : c.dirty()) {
        while (word != 0) {
          out.push_back(base + static_cast<uint64_t>(std::countr_zero(word)));
          word &= word - 1;
        }
        base += w;
      }
      c.skip_dirty(c.dirty_left());
    }
  }
  return out;
}

std::vector<uint64_t> CompressedBitmap::to_uncompressed() const {
  std::vector<uint64_t> out;
  out.reserve(logical_words());
  const uint64_t full = params_.full_mask();
  for (WordCursor c(*this); !c.done();) {
    if (c.clean_left() > 0) {
      out.insert(out.end(), c.clean_left(), c.fill() ? full : 0);
      c.skip_clean(c.clean_left());
    } else {
      out.insert(out.end(), c.dirty().begin(), c.dirty().end());
      c.skip_dirty(c.dirty_left());
    }
  }
  return out;
}

std::vector<bool> CompressedBitmap::to_bits() const {
  std::vector<bool> bits(bit_length_, false);
  for (uint64_t p : positions()) bits[p] = true;
  return bits;
}

BitmapStats CompressedBitmap::stats() const {
  BitmapStats s;
  s.words_total = words_.size();
  s.ones_count = count_ones();
  bool open = false;  // a clean run is still extendable by the next marker
  bool open_fill = false;
  for (size_t i = 0; i < words_.size();) {
    const uint64_t m = words_[i];
    const uint64_t clean = params_.marker_clean(m);
    const uint64_t dirty = params_.marker_dirty(m);
    const bool fill = WordParams::marker_fill(m);
    ++s.markers;
    if (clean > 0) {
      ++s.clean_run_markers;
      if (clean == params_.max_clean_count()) ++s.saturated_clean_counters;
      if (!(open && open_fill == fill)) ++s.clean_sequences;
      open = true;
      open_fill = fill;
    }
    if (dirty > 0) open = false;
    s.dirty_words += dirty;
    i += 1 + dirty;
  }
  return s;
}

RunCursor CompressedBitmap::runs() const { return RunCursor(*this); }

bool same_bits(const CompressedBitmap& a, const CompressedBitmap& b) {
  return a.params_ == b.params_ && a.bit_length_ == b.bit_length_ &&
         a.to_uncompressed() == b.to_uncompressed();
}

// ---------------------------------------------------------------------------
// WordCursor

WordCursor::WordCursor(const CompressedBitmap& b)
    : stream_(b.words_), params_(b.params_), words_left_(b.logical_words()) {
  normalize();
}

void WordCursor::normalize() {
  while (clean_left_ == 0 && dirty_left_ == 0 && next_ < stream_.size()) {
    const uint64_t m = stream_[next_];
    fill_ = WordParams::marker_fill(m);
    clean_left_ = params_.marker_clean(m);
    dirty_left_ = static_cast<size_t>(params_.marker_dirty(m));
    dirty_ = stream_.data() + next_ + 1;
    next_ += 1 + dirty_left_;
  }
}

void WordCursor::skip_clean(uint64_t n) {
  clean_left_ -= n;
  words_left_ -= n;
  normalize();
}

void WordCursor::skip_dirty(size_t n) {
  dirty_ += n;
  dirty_left_ -= n;
  words_left_ -= n;
  normalize();
}

void WordCursor::skip(uint64_t n) {
  while (n > 0) {
    uint64_t take;
    if (clean_left_ > 0) {
      take = std::min(n, clean_left_);
      skip_clean(take);
    } else {
      take = std::min<uint64_t>(n, dirty_left_);
      skip_dirty(static_cast<size_t>(take));
    }
    n -= take;
  }
}

// ---------------------------------------------------------------------------
// RunCursor

RunCursor::RunCursor(const CompressedBitmap& b, uint64_t extend_to)
    : cursor_(b),
      w_(b.params().bits()),
      bit_length_(b.bit_length()),
      total_(std::max(b.bit_length(), extend_to)) {
  if (next_piece(pending_)) {
    has_pending_ = true;
    next();
  } else {
    done_ = true;
  }
}

void RunCursor::next() {
  if (!has_pending_) {
    done_ = true;
    return;
  }
  run_ = pending_;
  has_pending_ = false;
  Run piece;
  while (next_piece(piece)) {
    if (piece.value == run_.value) {
      run_.end = piece.end;
    } else {
      pending_ = piece;
      has_pending_ = true;
      break;
    }
  }
}

bool RunCursor::next_piece(Run& piece) {
  for (;;) {
    if (in_word_) {
      const unsigned b = word_bit_;
      const bool value = ((word_ >> b) & 1) != 0;
      const uint64_t rest = (value ? ~word_ : word_) >> b;
      unsigned len = rest == 0 ? 64 - b : static_cast<unsigned>(std::countr_zero(rest));
      len = std::min(len, word_limit_ - b);
      piece = {word_base_ + b, word_base_ + b + len - 1, value};
      word_bit_ += len;
      if (word_bit_ >= word_limit_) in_word_ = false;
      pos_ = piece.end + 1;
      return true;
    }
    if (!cursor_.done()) {
      if (cursor_.clean_left() > 0) {
        const uint64_t n = cursor_.clean_left();
        const uint64_t end = std::min(pos_ + n * w_, bit_length_);
        piece = {pos_, end - 1, cursor_.fill()};
        cursor_.skip_clean(n);
        pos_ = end;
        return true;
      }
      word_ = cursor_.dirty()[0];
      cursor_.skip_dirty(1);
      word_base_ = pos_;
      word_bit_ = 0;
      word_limit_ = static_cast<unsigned>(std::min<uint64_t>(w_, bit_length_ - pos_));
      in_word_ = true;
      continue;
    }
    if (pos_ < total_) {
      piece = {pos_, total_ - 1, false};
      pos_ = total_;
      return true;
    }
    return false;
  }
}

// ---------------------------------------------------------------------------
// RunAppender

void RunAppender::append(bool value, uint64_t length) {
  const unsigned w = out_.params().bits();
  total_ += length;
  while (length > 0) {
    if (filled_ == 0 && length >= w) {
      const uint64_t n = length / w;
      out_.add_clean_words(value, n);
      length -= n * w;
      continue;
    }
    const unsigned take =
        static_cast<unsigned>(std::min<uint64_t>(w - filled_, length));
    if (value) word_ |= low_bits(take) << filled_;
    filled_ += take;
    length -= take;
    if (filled_ == w) {
      out_.add_word(word_);
      word_ = 0;
      filled_ = 0;
    }
  }
}

CompressedBitmap RunAppender::finish() && {
  if (filled_ > 0) {
    out_.add_word(word_);
    out_.finish(total_);
  }
  return std::move(out_);
}

// ---------------------------------------------------------------------------
// Logical operations

CompressedBitmap binary_op(const CompressedBitmap& a, const CompressedBitmap& b,
                           BitOp op) {
  if (!(a.params() == b.params())) {
    throw InvalidArgument("binary_op on bitmaps with different word sizes");
  }
  CompressedBitmap out(a.params());
  WordCursor ca(a);
  WordCursor cb(b);
  std::vector<uint64_t> scratch;
  std::vector<uint64_t> copy_scratch;
  while (!ca.done() && !cb.done()) {
    if (ca.clean_left() > 0 && cb.clean_left() > 0) {
      const uint64_t n = std::min(ca.clean_left(), cb.clean_left());
      out.add_clean_words(apply(op, ca.fill(), cb.fill()), n);
      ca.skip_clean(n);
      cb.skip_clean(n);
    } else if (ca.clean_left() > 0 || cb.clean_left() > 0) {
      const bool left = ca.clean_left() > 0;
      WordCursor& constant = left ? ca : cb;
      WordCursor& other = left ? cb : ca;
      const uint64_t n = std::min(constant.clean_left(), other.words_left());
      apply_outcome(constant_outcome(op, constant.fill(), left), out, other, n,
                    copy_scratch);
      constant.skip_clean(n);
    } else {
      const size_t n = std::min(ca.dirty_left(), cb.dirty_left());
      scratch.resize(n);
      simd::bitwise(op, ca.dirty().first(n), cb.dirty().first(n), scratch);
      out.add_words(scratch);
      ca.skip_dirty(n);
      cb.skip_dirty(n);
    }
  }
  // The shorter operand reads as zeros from here on.
  if (!ca.done()) {
    apply_outcome(constant_outcome(op, false, false), out, ca, ca.words_left(),
                  copy_scratch);
  }
  if (!cb.done()) {
    apply_outcome(constant_outcome(op, false, true), out, cb, cb.words_left(),
                  copy_scratch);
  }
  out.finish(std::max(a.bit_length(), b.bit_length()));
  return out;
}

CompressedBitmap complement(const CompressedBitmap& a) {
  CompressedBitmap out(a.params());
  WordCursor c(a);
  std::vector<uint64_t> scratch;
  copy_words(out, c, c.words_left(), true, scratch);
  out.finish(a.bit_length());
  return out;
}

}  // namespace ewahidx
