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
// File: ewah.hpp
// -----------------------------------------------------------------------------
//
// Enhanced Word-Aligned Hybrid (EWAH) compressed bitmaps.
//
// A compressed stream is a sequence of marker words, each followed by the
// verbatim ("dirty") words it announces:
//
//   [marker: fill | clean count | dirty count] [dirty]... [marker] ...
//
// A marker stands for `clean count` words that are all zeros (fill = 0) or all
// ones (fill = 1), followed by `dirty count` verbatim words. Logical bit i of a
// word is arithmetic bit i (LSB first). The logical length is kept separately;
// bits of the last word beyond it are always zero.
//
// Appending is word-granular and amortized O(1) per call. Bitmaps are
// immutable once built and may then be shared across threads.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ewahidx/simd/kernels.hpp"
#include "ewahidx/word_params.hpp"

namespace ewahidx {

// A maximal run of identical bits; end is inclusive.
struct Run {
  uint64_t start = 0;
  uint64_t end = 0;
  bool value = false;

  uint64_t length() const { return end - start + 1; }
  friend bool operator==(const Run&, const Run&) = default;
};

struct BitmapStats {
  uint64_t words_total = 0;
  uint64_t dirty_words = 0;
  uint64_t markers = 0;
  // Markers whose clean count is nonzero.
  uint64_t clean_run_markers = 0;
  // Markers whose clean count is at its maximum ("overruns").
  uint64_t saturated_clean_counters = 0;
  // Maximal sequences of identical clean words; a run split across saturated
  // markers counts once.
  uint64_t clean_sequences = 0;
  uint64_t ones_count = 0;

  // Percentage of clean-run counters that overflowed.
  double overrun_pct() const;
  // Fraction of the stored words that are not verbatim words.
  double clean_fraction() const;
  // Dirty words plus sequences of identical clean words.
  uint64_t storage_cost() const { return dirty_words + clean_sequences; }

  BitmapStats& operator+=(const BitmapStats& other);
};

class RunCursor;

class CompressedBitmap {
 public:
  explicit CompressedBitmap(WordParams params = WordParams::of(32))
      : params_(params) {}

  static CompressedBitmap with_word_size(unsigned bits) {
    return CompressedBitmap(WordParams::of(bits));
  }

  // Builds from ascending, distinct positions, all below bit_length.
  static CompressedBitmap from_positions(WordParams params,
                                         std::span<const uint64_t> positions,
                                         uint64_t bit_length);
  // Builds from uncompressed words (one logical word per element, low
  // params.bits() bits used). words.size() must equal ceil(bit_length / w).
  static CompressedBitmap from_uncompressed(WordParams params,
                                            std::span<const uint64_t> words,
                                            uint64_t bit_length);
  // Adopts a serialized word stream. Throws DataError if the stream is
  // inconsistent with bit_length.
  static CompressedBitmap from_stream(WordParams params,
                                      std::vector<uint64_t> words,
                                      uint64_t bit_length);

  const WordParams& params() const { return params_; }
  uint64_t bit_length() const { return bit_length_; }
  // Number of w-bit words the logical content spans.
  uint64_t logical_words() const {
    return (bit_length_ + params_.bits() - 1) / params_.bits();
  }
  // Compressed size in words, markers included.
  size_t size_in_words() const { return words_.size(); }
  std::span<const uint64_t> words() const { return words_; }

  // Appends count clean words in O(1), extending an open clean run of the
  // same fill when the counter allows. Requires a word-aligned length.
  void add_clean_words(bool fill, uint64_t count);
  // Appends one verbatim word, stored as-is even when it is clean.
  void add_dirty_word(uint64_t word);
  void add_dirty_words(std::span<const uint64_t> words);
  // Appends one word, promoting all-zero and all-one words to clean runs.
  void add_word(uint64_t word);
  void add_words(std::span<const uint64_t> words);

  // Sets bit pos; positions must be strictly increasing across calls. The
  // length becomes pos + 1.
  void set_bit(uint64_t pos);
  // Zero-extends to bit_length (which must not shrink the bitmap).
  void resize(uint64_t bit_length);
  // Declares the final logical length after word-granular appends. bit_length
  // must fall within the last appended word; bits past it are cleared.
  void finish(uint64_t bit_length);

  uint64_t count_ones() const;
  // True when no bit is set.
  bool none() const;
  std::vector<uint64_t> positions() const;
  std::vector<uint64_t> to_uncompressed() const;
  std::vector<bool> to_bits() const;
  BitmapStats stats() const;

  RunCursor runs() const;

  // Throws DataError describing the first structural inconsistency.
  void validate() const;

  // Same logical length and bits (representation may differ).
  friend bool same_bits(const CompressedBitmap& a, const CompressedBitmap& b);

 private:
  friend class WordCursor;

  void require_aligned() const;
  void open_marker();
  uint64_t& last_marker() { return words_[last_marker_]; }

  WordParams params_;
  std::vector<uint64_t> words_;
  uint64_t bit_length_ = 0;
  size_t last_marker_ = kNoMarker;

  static constexpr size_t kNoMarker = static_cast<size_t>(-1);
};

// Sequential reader over the logical words of a bitmap: clean runs are seen
// as (fill, count), verbatim words as spans.
class WordCursor {
 public:
  explicit WordCursor(const CompressedBitmap& b);

  bool done() const { return words_left_ == 0; }
  uint64_t words_left() const { return words_left_; }
  uint64_t clean_left() const { return clean_left_; }
  bool fill() const { return fill_; }
  size_t dirty_left() const { return dirty_left_; }
  std::span<const uint64_t> dirty() const { return {dirty_, dirty_left_}; }

  void skip_clean(uint64_t n);
  // Requires clean_left() == 0.
  void skip_dirty(size_t n);
  // Skips n logical words across clean runs, dirty words and markers.
  void skip(uint64_t n);

 private:
  void normalize();

  std::span<const uint64_t> stream_;
  WordParams params_;
  size_t next_ = 0;
  uint64_t clean_left_ = 0;
  bool fill_ = false;
  const uint64_t* dirty_ = nullptr;
  size_t dirty_left_ = 0;
  uint64_t words_left_ = 0;
};

// Iterates the maximal runs of identical bits. When extend_to exceeds the
// bitmap length, the bitmap reads as zero-extended to that length.
class RunCursor {
 public:
  explicit RunCursor(const CompressedBitmap& b, uint64_t extend_to = 0);

  bool done() const { return done_; }
  const Run& current() const { return run_; }
  void next();

 private:
  bool next_piece(Run& piece);

  WordCursor cursor_;
  uint64_t w_;
  uint64_t bit_length_;
  uint64_t total_;
  uint64_t pos_ = 0;
  uint64_t word_ = 0;
  uint64_t word_base_ = 0;
  unsigned word_bit_ = 0;
  unsigned word_limit_ = 0;
  bool in_word_ = false;
  Run run_;
  Run pending_;
  bool has_pending_ = false;
  bool done_ = false;
};

// Builds a canonical bitmap from a sequence of runs.
class RunAppender {
 public:
  explicit RunAppender(WordParams params) : out_(params) {}

  void append(bool value, uint64_t length);
  uint64_t length() const { return total_; }
  CompressedBitmap finish() &&;

 private:
  CompressedBitmap out_;
  uint64_t word_ = 0;
  unsigned filled_ = 0;
  uint64_t total_ = 0;
};

// Pointwise a op b. The shorter operand is zero-extended; runs in
// O(|a| + |b|) compressed words.
CompressedBitmap binary_op(const CompressedBitmap& a,
                           const CompressedBitmap& b, BitOp op);

CompressedBitmap complement(const CompressedBitmap& a);

}  // namespace ewahidx
