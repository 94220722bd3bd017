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

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <random>

#include "doctest.h"
#include "ewahidx/datagen.hpp"
#include "ewahidx/error.hpp"
#include "ewahidx/index.hpp"
#include "ewahidx/sort.hpp"
#include "oracle.hpp"

using namespace ewahidx;
using ewahidx::testing::Bits;

namespace {

StringRows animals() {
  return {{"cat"}, {"dog"}, {"cat"}, {"cat"}, {"bird"}, {"bird"}};
}

Bits bits_of(const char* s) {
  Bits b;
  for (; *s; ++s) b.push_back(*s == '1');
  return b;
}

struct Built {
  TableProfile profile;
  EncodedTable table;
  IndexHeader header;
};

Built prepare(const StringRows& rows, const CodingOptions& options) {
  Built b;
  b.profile = profile_rows(rows);
  b.table = encode_rows(rows, b.profile);
  b.header = make_header(b.profile, options);
  return b;
}

GenSpec random_spec(std::mt19937_64& rng, uint64_t max_rows, size_t max_columns) {
  GenSpec spec;
  spec.rows = rng() % (max_rows + 1);
  spec.seed = rng();
  const size_t cols = 1 + rng() % max_columns;
  for (size_t c = 0; c < cols; ++c) {
    ColumnSpec col;
    col.kind = rng() % 2 ? ColumnSpec::Kind::Zipf : ColumnSpec::Kind::Uniform;
    col.cardinality = 1 + rng() % (rng() % 3 == 0 ? 2000 : 60);
    spec.columns.push_back(col);
  }
  return spec;
}

std::vector<uint8_t> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void check_against_naive(const Built& b, const std::vector<IndexBlock>& blocks) {
  const auto naive = ewahidx::testing::naive_index(b.table, b.header);
  uint64_t next = 0;
  for (const auto& blk : blocks) {
    REQUIRE(blk.row_start == next);
    REQUIRE(blk.row_count > 0);
    REQUIRE(blk.bitmaps.size() == naive.size());
    for (size_t id = 0; id < naive.size(); ++id) {
      const auto& bm = blk.bitmaps[id];
      bm.validate();
      REQUIRE(bm.bit_length() == blk.row_count);
      REQUIRE(ewahidx::testing::decode(bm) ==
              ewahidx::testing::slice(naive[id], blk.row_start, blk.row_count));
    }
    next += blk.row_count;
  }
  REQUIRE(next == b.table.rows);
}

}  // namespace

TEST_CASE("three bitmaps of the animal column") {
  CodingOptions o;
  o.k = 1;
  const Built b = prepare(animals(), o);
  const auto blocks = build_blocks(b.table, b.header);
  REQUIRE(blocks.size() == 1);
  const auto& col = b.header.columns[0];
  CHECK(col.N == 3);
  const auto bitmap_of = [&](const char* v) {
    return blocks[0].bitmaps[col.codes[*col.dict.rank(v)][0] - 1];
  };
  CHECK(ewahidx::testing::decode(bitmap_of("cat")) == bits_of("101100"));
  CHECK(ewahidx::testing::decode(bitmap_of("dog")) == bits_of("010000"));
  CHECK(ewahidx::testing::decode(bitmap_of("bird")) == bits_of("000011"));
  CHECK(bitmap_of("cat").positions() == std::vector<uint64_t>{0, 2, 3});
}

TEST_CASE("empty table gives a header-only index") {
  ewahidx::testing::TempDir dir;
  const std::string table = dir.file("empty.csv");
  write_table(table, {}, ',');
  const TableProfile profile = profile_table(table);
  const IndexHeader header = make_header(profile, {});
  const std::string path = dir.file("empty.idx");
  const BuildReport rep = build_index_file(table, path, profile, header);
  CHECK(rep.rows == 0);
  CHECK(rep.blocks == 0);
  IndexReader r(path);
  CHECK(r.rows() == 0);
  CHECK(r.block_count() == 0);
  const IndexStats s = index_stats(r);
  CHECK(s.total.words_total == 0);
  CHECK(s.total.dirty_words == 0);
  CHECK(s.total.overrun_pct() == 0.0);
}

TEST_CASE("builder matches the naive construction") {
  std::mt19937_64 rng(20261016);
  for (int iter = 0; iter < 60; ++iter) {
    const GenSpec spec = random_spec(rng, iter == 0 ? 10000 : 3000, 4);
    const StringRows rows = generate_rows(spec);
    CodingOptions o;
    o.k = 1 + static_cast<uint32_t>(rng() % 3);
    o.w = std::array<unsigned, 3>{16, 32, 64}[rng() % 3];
    o.scheme = static_cast<Scheme>(rng() % 5);
    o.seed = rng();
    Built b = prepare(rows, o);
    if (rng() % 2) b.table = sort_encoded(b.table, b.profile, SortPlan::parse("lex"));
    const uint64_t budget = rng() % 3 == 0 ? kDefaultBudgetBytes : 64 + rng() % 4096;
    CAPTURE(iter);
    CAPTURE(o.w);
    CAPTURE(o.k);
    CAPTURE(budget);
    const auto blocks = build_blocks(b.table, b.header, budget);
    check_against_naive(b, blocks);

    // Exactly k bits per row per column.
    for (const auto& blk : blocks) {
      std::vector<uint32_t> per_row(blk.row_count * b.header.columns.size(), 0);
      for (uint32_t id = 0; id < blk.bitmaps.size(); ++id) {
        const size_t c = b.header.column_of(id);
        for (uint64_t p : blk.bitmaps[id].positions()) ++per_row[p * b.header.columns.size() + c];
      }
      for (size_t i = 0; i < per_row.size(); ++i) {
        REQUIRE(per_row[i] == b.header.columns[i % b.header.columns.size()].k);
      }
    }
  }
}

TEST_CASE("small budgets close blocks on word boundaries") {
  std::mt19937_64 rng(7);
  GenSpec spec;
  spec.rows = 5000;
  spec.columns = {ColumnSpec::parse("uniform:50"), ColumnSpec::parse("zipf:200")};
  CodingOptions o;
  o.w = 16;
  const Built b = prepare(generate_rows(spec), o);
  const auto blocks = build_blocks(b.table, b.header, 512);
  CHECK(blocks.size() > 5);
  for (size_t i = 0; i + 1 < blocks.size(); ++i) CHECK(blocks[i].row_count % 16 == 0);
  check_against_naive(b, blocks);
}

TEST_CASE("file round trip") {
  ewahidx::testing::TempDir dir;
  GenSpec spec;
  spec.rows = 4000;
  spec.seed = 99;
  spec.columns = {ColumnSpec::parse("zipf:300"), ColumnSpec::parse("uniform:7"),
                  ColumnSpec::parse("uniform:1")};
  const std::string table = dir.file("t.csv");
  generate_file(spec, table);
  ProfileOptions po;
  po.numeric_columns = {1};
  const TableProfile profile = profile_table(table, po);
  CodingOptions o;
  o.k = 2;
  o.w = 64;
  o.scheme = Scheme::AltGrayLex;
  o.seed = 5;
  o.column_order = {2, 0, 1};
  const IndexHeader header = make_header(profile, o);
  const std::string path = dir.file("t.idx");
  const BuildReport rep = build_index_file(table, path, profile, header, 2048);
  CHECK(rep.rows == 4000);
  CHECK(rep.blocks > 1);

  IndexReader r(path);
  CHECK(r.rows() == 4000);
  CHECK(r.block_count() == rep.blocks);
  const IndexHeader& h = r.header();
  CHECK(h.w == 64);
  REQUIRE(h.columns.size() == 3);
  for (size_t c = 0; c < 3; ++c) {
    CHECK(h.columns[c].k == header.columns[c].k);
    CHECK(h.columns[c].N == header.columns[c].N);
    CHECK(h.columns[c].scheme == Scheme::AltGrayLex);
    CHECK(h.columns[c].seed == header.columns[c].seed);
    CHECK(h.columns[c].numeric == (c == 1));
    CHECK(h.columns[c].dict.values == header.columns[c].dict.values);
    CHECK(h.columns[c].codes == header.columns[c].codes);
  }
  // A constant column is limited to k = 1.
  CHECK(h.columns[2].k == 1);
  CHECK(h.columns[2].N == 1);

  const auto blocks = build_blocks(encode_table(table, profile), header, 2048);
  REQUIRE(blocks.size() == r.block_count());
  for (size_t blk = 0; blk < blocks.size(); ++blk) {
    const auto offs = r.offsets(blk);
    for (size_t i = 1; i < offs.size(); ++i) REQUIRE(offs[i] > offs[i - 1]);
    const IndexBlock loaded = r.load_block(blk);
    CHECK(loaded.row_start == blocks[blk].row_start);
    for (size_t id = 0; id < loaded.bitmaps.size(); ++id) {
      const auto a = loaded.bitmaps[id].words();
      const auto e = blocks[blk].bitmaps[id].words();
      REQUIRE(std::equal(a.begin(), a.end(), e.begin(), e.end()));
    }
  }
  const IndexStats fs = index_stats(r);
  const IndexStats ms = index_stats(header, blocks);
  CHECK(fs.total.words_total == ms.total.words_total);
  CHECK(fs.total.dirty_words == ms.total.dirty_words);
  CHECK(fs.rows == 4000);
  uint64_t col_words = 0;
  for (const auto& c : fs.per_column) col_words += c.words_total;
  CHECK(col_words == fs.total.words_total);
}

TEST_CASE("animal index pins the file format") {
  ewahidx::testing::TempDir dir;
  const std::string table = dir.file("a.csv");
  write_table(table, animals(), ',');
  const TableProfile profile = profile_table(table);
  CodingOptions o;
  o.w = 16;
  const IndexHeader header = make_header(profile, o);
  const std::string path = dir.file("a.idx");
  build_index_file(table, path, profile, header);
  const auto bytes = slurp(path);
  std::string hex;
  for (uint8_t c : bytes) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", c);
    hex += buf;
  }
  // Header: magic, v1, w=16, 1 column (k=1, N=3, gray-lex, seed 0), values
  // bird/cat/dog, codes; block: rows 0..5, three offsets; footer.
  const std::string golden =
      "4557414849445800" "01" "10" "0000" "01000000"
      "01000000" "03000000" "01" "00" "0000" "0000000000000000" "03000000"
      "00000000" "04000000" "62697264"
      "00000000" "03000000" "636174"
      "00000000" "03000000" "646f67"
      "03000000" "02000000" "01000000"
      "88fb9f40"
      "0000000000000000" "06000000" "03000000"
      "20000000" "28000000" "30000000"
      "740412ef"
      "02000000" "0002" "0200"
      "02000000" "0002" "0d00"
      "02000000" "0002" "3000"
      "0100000000000000" "5a00000000000000" "0000000000000000" "06000000"
      "0600000000000000"
      "654e70ae"
      "9200000000000000"
      "45574148454e4400";
  CHECK(hex == golden);
}

TEST_CASE("corruption is detected") {
  ewahidx::testing::TempDir dir;
  const std::string table = dir.file("a.csv");
  write_table(table, animals(), ',');
  const TableProfile profile = profile_table(table);
  const IndexHeader header = make_header(profile, {});
  const std::string path = dir.file("a.idx");
  build_index_file(table, path, profile, header);
  const auto good = slurp(path);

  CHECK_THROWS_AS(IndexReader(dir.file("missing.idx")), IoError);

  auto bad = good;
  bad[20] ^= 0x01;  // inside the header
  spit(path, bad);
  CHECK_THROWS_AS(IndexReader{path}, DataError);

  spit(path, good);
  const uint64_t block_at = IndexReader(path).block(0).offset;
  bad = good;
  bad[block_at + 16] ^= 0x40;  // first offset
  spit(path, bad);
  {
    IndexReader r(path);
    CHECK_THROWS_AS(r.load_bitmap(0, 0), DataError);
  }

  bad.assign(good.begin(), good.end() - 3);
  spit(path, bad);
  CHECK_THROWS_AS(IndexReader{path}, DataError);

  bad = good;
  bad[bad.size() - 20] ^= 0x02;  // footer crc
  spit(path, bad);
  CHECK_THROWS_AS(IndexReader{path}, DataError);
}

TEST_CASE("sorted single columns stay within the dirty-word bound") {
  std::mt19937_64 rng(4);
  for (int iter = 0; iter < 40; ++iter) {
    const unsigned w = 32;
    const uint64_t card = 1 + rng() % 2000;
    const uint64_t n = (200 + rng() % 40000) / w * w;
    GenSpec spec;
    spec.rows = n;
    spec.seed = rng();
    spec.columns = {rng() % 2 ? ColumnSpec{ColumnSpec::Kind::Zipf, card, 1.0}
                              : ColumnSpec{ColumnSpec::Kind::Uniform, card, 1.0}};
    CodingOptions o;
    o.k = 1 + static_cast<uint32_t>(rng() % 3);
    o.w = w;
    Built b = prepare(generate_rows(spec), o);
    b.table = sort_encoded(b.table, b.profile, SortPlan::parse("lex"));
    const auto blocks = build_blocks(b.table, b.header);
    const IndexStats s = index_stats(b.header, blocks);
    const double ni = static_cast<double>(b.profile.columns[0].cardinality());
    const uint32_t k = b.header.columns[0].k;
    CAPTURE(ni);
    CAPTURE(k);
    CHECK(s.total.dirty_words <= 2 * ni);
    CHECK(static_cast<double>(s.total.storage_cost()) <=
          4 * ni + std::ceil(k * std::pow(ni, 1.0 / k)));
  }
}
