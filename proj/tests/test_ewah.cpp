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

#include <random>

#include "doctest.h"
#include "ewahidx/error.hpp"
#include "ewahidx/ewah.hpp"
#include "oracle.hpp"

using namespace ewahidx;
using ewahidx::testing::Bits;
using ewahidx::testing::decode;

namespace {

std::vector<Run> collect_runs(const CompressedBitmap& b, uint64_t extend = 0) {
  std::vector<Run> out;
  for (RunCursor c(b, extend); !c.done(); c.next()) out.push_back(c.current());
  return out;
}

std::vector<Run> naive_runs(const Bits& bits) {
  std::vector<Run> out;
  for (uint64_t i = 0; i < bits.size(); ++i) {
    if (out.empty() || out.back().value != bits[i]) {
      out.push_back({i, i, bits[i]});
    } else {
      out.back().end = i;
    }
  }
  return out;
}

// No two adjacent markers that could have been one.
bool canonical(const CompressedBitmap& b) {
  const WordParams& p = b.params();
  const auto words = b.words();
  size_t prev = SIZE_MAX;
  for (size_t i = 0; i < words.size();) {
    const uint64_t m = words[i];
    if (prev != SIZE_MAX) {
      const uint64_t pm = words[prev];
      if (p.marker_dirty(pm) == 0 && p.marker_clean(m) > 0 &&
          p.marker_clean(pm) < p.max_clean_count() &&
          (p.marker_clean(pm) == 0 || WordParams::marker_fill(pm) == WordParams::marker_fill(m))) {
        return false;
      }
    }
    for (uint64_t d = 0; d < p.marker_dirty(m); ++d) {
      const uint64_t x = words[i + 1 + d];
      if (x == 0 || x == p.full_mask()) return false;
    }
    prev = i;
    i += 1 + p.marker_dirty(m);
  }
  return true;
}

}  // namespace

TEST_CASE("word params") {
  CHECK(WordParams::of(32).clean_count_bits() == 16);
  CHECK(WordParams::of(32).dirty_count_bits() == 15);
  CHECK(WordParams::of(16).max_clean_count() == 255);
  CHECK(WordParams::of(64).max_dirty_count() == (uint64_t{1} << 31) - 1);
  CHECK_THROWS_AS(WordParams::of(12), InvalidArgument);
  for (unsigned w : {16u, 32u, 64u}) {
    const WordParams p = WordParams::of(w);
    CHECK(1 + p.clean_count_bits() + p.dirty_count_bits() == w);
    const uint64_t m = p.make_marker(true, p.max_clean_count(), p.max_dirty_count());
    CHECK(m == p.full_mask());
  }
}

TEST_CASE("empty bitmap") {
  for (unsigned w : {32u, 64u}) {
    CompressedBitmap b = CompressedBitmap::with_word_size(w);
    CHECK(b.bit_length() == 0);
    CHECK(b.count_ones() == 0);
    CHECK(b.positions().empty());
    CHECK(collect_runs(b).empty());
    const BitmapStats s = b.stats();
    CHECK(s.words_total == 0);
    CHECK(s.markers == 0);
    CHECK(s.ones_count == 0);
  }
}

TEST_CASE("clean words and counter saturation") {
  CompressedBitmap b = CompressedBitmap::with_word_size(32);
  b.add_clean_words(false, uint64_t{1} << 20);
  CHECK(b.size_in_words() == 17);
  const BitmapStats s = b.stats();
  CHECK(s.markers == 17);
  CHECK(s.clean_run_markers == 17);
  CHECK(s.saturated_clean_counters == 16);
  CHECK(s.clean_sequences == 1);
  CHECK(b.bit_length() == (uint64_t{1} << 25));

  CompressedBitmap ones = CompressedBitmap::with_word_size(32);
  ones.add_clean_words(true, 3);
  ones.add_clean_words(true, 0);
  CHECK(ones.size_in_words() == 1);
  CHECK(ones.count_ones() == 96);
  CHECK(decode(ones) == Bits(96, true));
}

TEST_CASE("dirty words") {
  CompressedBitmap b = CompressedBitmap::with_word_size(32);
  b.add_dirty_word(0x00000001);
  CHECK(b.positions() == std::vector<uint64_t>{0});
  CHECK(b.bit_length() == 32);

  CompressedBitmap many = CompressedBitmap::with_word_size(32);
  std::vector<uint64_t> words(uint64_t{1} << 15, 0x5);
  many.add_dirty_words(words);
  CHECK(many.stats().markers >= 2);
  CHECK(many.stats().dirty_words == words.size());

  // A verbatim zero word keeps its representation but not its meaning.
  CompressedBitmap z = CompressedBitmap::with_word_size(32);
  z.add_dirty_word(0);
  CompressedBitmap c = CompressedBitmap::with_word_size(32);
  c.add_clean_words(false, 1);
  CHECK(z.size_in_words() == 2);
  CHECK(same_bits(z, c));
}

TEST_CASE("set_bit") {
  CompressedBitmap b = CompressedBitmap::with_word_size(32);
  b.set_bit(32);
  b.resize(62);
  CHECK(b.positions() == std::vector<uint64_t>{32});
  CHECK(b.bit_length() == 62);
  // One zero clean word, then the verbatim word holding bit 32.
  REQUIRE(b.size_in_words() == 2);
  CHECK(b.words()[1] == 1);

  CompressedBitmap first = CompressedBitmap::with_word_size(32);
  first.set_bit(0);
  CHECK(first.words()[1] == 1);
  CHECK_THROWS_AS(first.set_bit(0), InvalidArgument);

  const CompressedBitmap inv = complement(b);
  CHECK(inv.count_ones() == 61);
  const Bits bits = decode(inv);
  CHECK_FALSE(bits[32]);
}

TEST_CASE("runs") {
  const CompressedBitmap zeros = CompressedBitmap::from_positions(WordParams::of(32), {}, 64);
  CHECK(collect_runs(zeros) == std::vector<Run>{{0, 63, false}});

  const std::vector<uint64_t> cat{0, 2, 3};
  const CompressedBitmap b = CompressedBitmap::from_positions(WordParams::of(32), cat, 6);
  CHECK(collect_runs(b) ==
        std::vector<Run>{{0, 0, true}, {1, 1, false}, {2, 3, true}, {4, 5, false}});
  CHECK(b.positions() == cat);
  CHECK(collect_runs(b, 10).back() == Run{4, 9, false});
}

TEST_CASE("complement") {
  const CompressedBitmap zeros = CompressedBitmap::from_positions(WordParams::of(32), {}, 96);
  const CompressedBitmap ones = complement(zeros);
  CHECK(ones.count_ones() == 96);
  CHECK(ones.size_in_words() == 1);
}

TEST_CASE("AND keeps the alternating pattern") {
  for (unsigned w : {16u, 32u, 64u}) {
    const WordParams p = WordParams::of(w);
    const uint64_t n = 1000;
    std::vector<uint64_t> even;
    for (uint64_t i = 0; i < n; i += 2) even.push_back(i);
    const CompressedBitmap alt = CompressedBitmap::from_positions(p, even, n);
    const CompressedBitmap all = complement(CompressedBitmap::from_positions(p, {}, n));
    const CompressedBitmap r = binary_op(alt, all, BitOp::And);
    CHECK(r.positions() == even);
    CHECK(binary_op(alt, complement(all), BitOp::And).none());
    CHECK(binary_op(alt, alt, BitOp::Xor).none());
  }
}

TEST_CASE("randomized oracle equivalence") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 300; ++iter) {
    const unsigned w = std::array<unsigned, 3>{16, 32, 64}[iter % 3];
    const WordParams p = WordParams::of(w);
    const uint64_t la = rng() % 5000;
    const uint64_t lb = iter % 4 == 0 ? rng() % 5000 : la;
    const Bits a = ewahidx::testing::random_bits(rng, la);
    const Bits b = ewahidx::testing::random_bits(rng, lb);
    const CompressedBitmap ca = CompressedBitmap::from_positions(p, ewahidx::testing::set_positions(a), la);
    const CompressedBitmap cb = ewahidx::testing::from_bits(p, b);
    CHECK_NOTHROW(ca.validate());
    CHECK_NOTHROW(cb.validate());
    REQUIRE(decode(ca) == a);
    REQUIRE(decode(cb) == b);
    CHECK(naive_runs(a) == collect_runs(ca));
    CHECK(ca.positions() == ewahidx::testing::set_positions(a));
    CHECK(ca.count_ones() == ca.positions().size());
    CHECK(canonical(ca));
    for (BitOp op : {BitOp::And, BitOp::Or, BitOp::Xor, BitOp::AndNot}) {
      const CompressedBitmap r = binary_op(ca, cb, op);
      REQUIRE(decode(r) == ewahidx::testing::pointwise(op, a, b));
      CHECK(r.size_in_words() <= ca.size_in_words() + cb.size_in_words());
      CHECK(canonical(r));
      CHECK_NOTHROW(r.validate());
    }
    const CompressedBitmap na = complement(ca);
    Bits flipped = a;
    flipped.flip();
    CHECK(decode(na) == flipped);
    CHECK(same_bits(complement(na), ca));

    // Uncompressed round trip and never-expand bound.
    const auto raw = ca.to_uncompressed();
    const CompressedBitmap back = CompressedBitmap::from_uncompressed(p, raw, la);
    CHECK(same_bits(back, ca));
    const uint64_t overhead = 1 + raw.size() / p.max_dirty_count();
    CHECK(ca.size_in_words() <= raw.size() + overhead);

    // Stream adoption.
    const auto copy = CompressedBitmap::from_stream(
        p, std::vector<uint64_t>(ca.words().begin(), ca.words().end()), la);
    CHECK(same_bits(copy, ca));
  }
}

TEST_CASE("stream validation rejects corruption") {
  const WordParams p = WordParams::of(32);
  // Marker announcing one dirty word that is missing.
  CHECK_THROWS_AS(CompressedBitmap::from_stream(p, {p.make_marker(false, 0, 1)}, 32), DataError);
  // Length mismatch.
  CHECK_THROWS_AS(CompressedBitmap::from_stream(p, {p.make_marker(false, 2, 0)}, 32), DataError);
  // Bits beyond the length.
  CHECK_THROWS_AS(CompressedBitmap::from_stream(p, {p.make_marker(false, 0, 1), 0xff00}, 8), DataError);
  CHECK_NOTHROW(CompressedBitmap::from_stream(p, {p.make_marker(false, 0, 1), 0xff}, 8));
}

TEST_CASE("run appender") {
  RunAppender app(WordParams::of(16));
  app.append(true, 5);
  app.append(false, 100);
  app.append(true, 40);
  app.append(false, 3);
  const CompressedBitmap b = std::move(app).finish();
  CHECK(b.bit_length() == 148);
  CHECK(collect_runs(b) ==
        std::vector<Run>{{0, 4, true}, {5, 104, false}, {105, 144, true}, {145, 147, false}});
  CHECK(canonical(b));
}
