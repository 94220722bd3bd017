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
#include <random>

#include "doctest.h"
#include "ewahidx/datagen.hpp"
#include "ewahidx/error.hpp"
#include "ewahidx/query.hpp"
#include "ewahidx/sort.hpp"
#include "oracle.hpp"

using namespace ewahidx;
using ewahidx::testing::Bits;
using ewahidx::testing::decode;
using ewahidx::testing::from_bits;

namespace {

constexpr std::array<Strategy, 4> kStrategies = {Strategy::Generic, Strategy::TwoHeap,
                                                 Strategy::Pairwise, Strategy::InPlace};
constexpr std::array<AggOp, 3> kOps = {AggOp::And, AggOp::Or, AggOp::Xor};

Bits fold(AggOp op, const std::vector<Bits>& in) {
  size_t len = 0;
  for (const auto& b : in) len = std::max(len, b.size());
  Bits out(len);
  for (size_t i = 0; i < len; ++i) {
    size_t ones = 0;
    for (const auto& b : in) ones += i < b.size() && b[i];
    out[i] = op == AggOp::And ? ones == in.size() : op == AggOp::Or ? ones > 0 : (ones & 1);
  }
  return out;
}

CompressedBitmap run(Strategy s, std::span<const CompressedBitmap> in, AggOp op) {
  AggregateOptions o;
  o.strategy = s;
  return aggregate(in, op, o);
}

Bits bits_of(const char* s) {
  Bits b;
  for (; *s; ++s) b.push_back(*s == '1');
  return b;
}

// Row-scan reference for a conjunctive query over string rows.
std::vector<uint64_t> scan(const StringRows& rows, const Query& q, const IndexHeader& h) {
  std::vector<uint64_t> out;
  for (uint64_t r = 0; r < rows.size(); ++r) {
    bool ok = true;
    for (const auto& p : q.predicates) {
      const std::string& v = rows[r][p.column];
      if (p.kind == Predicate::Kind::Equals) {
        ok = ok && v == p.value;
      } else if (h.columns[p.column].numeric) {
        const double x = std::stod(v);
        ok = ok && (!p.lo || x >= std::stod(*p.lo)) && (!p.hi || x <= std::stod(*p.hi));
      } else {
        ok = ok && (!p.lo || v >= *p.lo) && (!p.hi || v <= *p.hi);
      }
    }
    if (ok) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("strategies agree with a bitwise fold") {
  std::mt19937_64 rng(314);
  for (int iter = 0; iter < 150; ++iter) {
    const WordParams p = WordParams::of(std::array<unsigned, 3>{16, 32, 64}[rng() % 3]);
    const size_t L = 1 + rng() % (iter % 10 == 0 ? 128 : 12);
    std::vector<Bits> bits;
    std::vector<CompressedBitmap> in;
    uint64_t total = 0;
    for (size_t i = 0; i < L; ++i) {
      const uint64_t len = rng() % 4 == 0 ? rng() % 200 : rng() % 20000;
      bits.push_back(ewahidx::testing::random_bits(rng, len));
      in.push_back(from_bits(p, bits.back()));
      total += in.back().size_in_words();
    }
    for (AggOp op : kOps) {
      const Bits want = fold(op, bits);
      for (Strategy s : kStrategies) {
        CAPTURE(iter);
        CAPTURE(static_cast<int>(op));
        CAPTURE(strategy_name(s));
        const CompressedBitmap got = run(s, in, op);
        got.validate();
        REQUIRE(decode(got) == want);
        CHECK(got.size_in_words() <= total);
      }
    }
  }
}

TEST_CASE("aggregation examples") {
  const WordParams p = WordParams::of(32);
  SUBCASE("OR of the animal bitmaps is all ones") {
    const std::vector<CompressedBitmap> in = {from_bits(p, bits_of("101100")),
                                              from_bits(p, bits_of("010000")),
                                              from_bits(p, bits_of("000011"))};
    for (Strategy s : kStrategies) CHECK(decode(run(s, in, AggOp::Or)) == bits_of("111111"));
  }
  SUBCASE("single input is the identity") {
    std::mt19937_64 rng(1);
    const Bits b = ewahidx::testing::random_bits(rng, 5000);
    const std::vector<CompressedBitmap> in = {from_bits(p, b)};
    for (Strategy s : kStrategies) {
      for (AggOp op : kOps) CHECK(decode(run(s, in, op)) == b);
    }
  }
  SUBCASE("XOR cancels a repeated input") {
    std::mt19937_64 rng(2);
    const Bits x = ewahidx::testing::random_bits(rng, 3000);
    const Bits y = ewahidx::testing::random_bits(rng, 3000);
    const std::vector<CompressedBitmap> in = {from_bits(p, x), from_bits(p, x), from_bits(p, y)};
    for (Strategy s : kStrategies) CHECK(decode(run(s, in, AggOp::Xor)) == y);
  }
  SUBCASE("OR of 1010... and 1111...") {
    Bits alt(640), ones(640, true);
    for (size_t i = 0; i < alt.size(); i += 2) alt[i] = true;
    const std::vector<CompressedBitmap> in = {from_bits(p, alt), from_bits(p, ones)};
    for (Strategy s : kStrategies) {
      const auto out = run(s, in, AggOp::Or);
      CHECK(decode(out) == ones);
      CHECK(out.size_in_words() <= in[0].size_in_words() + in[1].size_in_words());
    }
  }
  SUBCASE("AND zero-extends the shorter input") {
    const std::vector<CompressedBitmap> in = {from_bits(p, Bits(100, true)),
                                              from_bits(p, Bits(40, true))};
    Bits want(100, false);
    for (size_t i = 0; i < 40; ++i) want[i] = true;
    for (Strategy s : kStrategies) {
      const auto out = run(s, in, AggOp::And);
      CHECK(out.bit_length() == 100);
      CHECK(decode(out) == want);
    }
  }
  SUBCASE("OR of empty inputs is empty") {
    const std::vector<CompressedBitmap> in(5, from_bits(p, Bits(1000, false)));
    for (Strategy s : kStrategies) CHECK(run(s, in, AggOp::Or).none());
  }
  SUBCASE("AND with an empty operand short-circuits") {
    std::mt19937_64 rng(3);
    std::vector<CompressedBitmap> in;
    for (int i = 0; i < 5; ++i) in.push_back(from_bits(p, ewahidx::testing::random_bits(rng, 4000)));
    in.push_back(from_bits(p, Bits(100, false)));
    const auto out = aggregate_pairwise(in, AggOp::And);
    CHECK(out.none());
    CHECK(out.bit_length() == 4000);
    CHECK(out.size_in_words() == 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(aggregate_generic({}, AggOp::Or), InvalidArgument);
    const std::vector<CompressedBitmap> mixed = {CompressedBitmap(WordParams::of(16)),
                                                 CompressedBitmap(WordParams::of(32))};
    CHECK_THROWS_AS(aggregate_two_heap(mixed, AggOp::Or), InvalidArgument);
    const std::vector<CompressedBitmap> big = {from_bits(p, Bits(100000, true))};
    CHECK_THROWS_AS(aggregate_inplace(big, AggOp::Or, 1000), InvalidArgument);
  }
}

TEST_CASE("two-heap AND over many sparse bitmaps") {
  std::mt19937_64 rng(64);
  const WordParams p = WordParams::of(32);
  std::vector<CompressedBitmap> in;
  for (int i = 0; i < 64; ++i) {
    Bits b(50000, false);
    for (size_t j = 0; j < b.size(); ++j) b[j] = j % 7 == 0 || rng() % 50 == 0;
    in.push_back(from_bits(p, b));
  }
  CHECK(same_bits(aggregate_two_heap(in, AggOp::And), aggregate_generic(in, AggOp::And)));
  CHECK(same_bits(aggregate_inplace(in, AggOp::Or), aggregate_two_heap(in, AggOp::Or)));
}

TEST_CASE("strategy names and auto choice") {
  for (Strategy s : {Strategy::Auto, Strategy::Generic, Strategy::TwoHeap, Strategy::Pairwise,
                     Strategy::InPlace}) {
    CHECK(parse_strategy(strategy_name(s)) == s);
  }
  CHECK_THROWS_AS(parse_strategy("fast"), InvalidArgument);
  AggregateOptions o;
  CHECK(resolve_strategy(8, o) == Strategy::Pairwise);
  CHECK(resolve_strategy(9, o) == Strategy::TwoHeap);
  o.pairwise_max_inputs = 2;
  CHECK(resolve_strategy(3, o) == Strategy::TwoHeap);
}

TEST_CASE("query text") {
  const Query q = Query::parse("col1=cat & col3=10..20&2=..m&col4=b..");
  REQUIRE(q.predicates.size() == 4);
  CHECK(q.predicates[0].column == 0);
  CHECK(q.predicates[0].kind == Predicate::Kind::Equals);
  CHECK(q.predicates[0].value == "cat");
  CHECK(q.predicates[1].column == 2);
  CHECK(q.predicates[1].kind == Predicate::Kind::Range);
  CHECK(*q.predicates[1].lo == "10");
  CHECK(*q.predicates[1].hi == "20");
  CHECK(q.predicates[2].column == 1);
  CHECK(!q.predicates[2].lo);
  CHECK(*q.predicates[2].hi == "m");
  CHECK(!q.predicates[3].hi);
  CHECK_THROWS_AS(Query::parse("cat"), InvalidArgument);
  CHECK_THROWS_AS(Query::parse("col0=cat"), InvalidArgument);
  CHECK_THROWS_AS(Query::parse("colx=1"), InvalidArgument);
}

TEST_CASE("animal queries") {
  const StringRows rows = {{"cat"}, {"dog"}, {"cat"}, {"cat"}, {"bird"}, {"bird"}};
  const TableProfile profile = profile_rows(rows);
  const IndexHeader h = make_header(profile, {});
  const auto blocks = build_blocks(encode_rows(rows, profile), h);
  const MemoryIndexSource src(h, blocks);
  CHECK(equality_query(src, 0, "cat").rows == std::vector<uint64_t>{0, 2, 3});
  const QueryResult unknown = equality_query(src, 0, "cow");
  CHECK(unknown.rows.empty());
  CHECK(unknown.status == QueryStatus::UnknownValue);
  const QueryResult all = run_query(src, Query::parse("col1=.."));
  CHECK(all.rows.size() == 6);
  CHECK(run_query(src, Query::parse("col1=x..z")).status == QueryStatus::EmptyRange);
  CHECK_THROWS_AS(run_query(src, Query::parse("col2=cat")), InvalidArgument);
}

TEST_CASE("queries match a row scan") {
  std::mt19937_64 rng(2718);
  ewahidx::testing::TempDir dir;
  for (int iter = 0; iter < 12; ++iter) {
    GenSpec spec;
    spec.rows = 500 + rng() % 6000;
    spec.seed = rng();
    const size_t cols = 2 + rng() % 3;
    for (size_t c = 0; c < cols; ++c) {
      spec.columns.push_back({rng() % 2 ? ColumnSpec::Kind::Zipf : ColumnSpec::Kind::Uniform,
                              2 + rng() % 150, 1.0});
    }
    const std::string table = dir.file("q" + std::to_string(iter) + ".csv");
    generate_file(spec, table);
    const StringRows rows = read_table(table, ',');
    ProfileOptions po;
    po.numeric_columns = {0};
    const TableProfile profile = profile_table(table, po);

    CodingOptions k1;
    k1.w = std::array<unsigned, 3>{16, 32, 64}[rng() % 3];
    CodingOptions k2 = k1;
    k2.k = 2;
    const IndexHeader h1 = make_header(profile, k1);
    const IndexHeader h2 = make_header(profile, k2);
    const std::string path = dir.file("q" + std::to_string(iter) + ".idx");
    build_index_file(table, path, profile, h1, 700);
    IndexReader reader(path);
    REQUIRE(reader.block_count() > 1);
    const FileIndexSource file(reader);
    const auto blocks2 = build_blocks(encode_rows(rows, profile), h2);
    const MemoryIndexSource mem2(h2, blocks2);

    for (int qi = 0; qi < 25; ++qi) {
      QueryOptions qo;
      qo.threads = 1 + static_cast<unsigned>(rng() % 3);
      qo.aggregate.strategy = static_cast<Strategy>(rng() % 5);
      // Equality on one column, checked on both encodings.
      const uint32_t c = static_cast<uint32_t>(rng() % cols);
      const auto& dict = profile.columns[c].dict.values;
      const std::string v = dict[rng() % dict.size()];
      const Query eq{{Predicate::equals(c, v)}};
      const auto want_eq = scan(rows, eq, h1);
      CHECK(run_query(file, eq, qo).rows == want_eq);
      CHECK(run_query(mem2, eq, qo).rows == want_eq);

      // A conjunction of ranges on every column, numeric first column.
      Query rq;
      for (uint32_t d = 0; d < cols; ++d) {
        const auto& dv = profile.columns[d].dict.values;
        std::string a = dv[rng() % dv.size()];
        std::string b = dv[rng() % dv.size()];
        if (d == 0 ? std::stod(b) < std::stod(a) : b < a) std::swap(a, b);
        rq.predicates.push_back(Predicate::range(d, a, b));
      }
      const QueryResult got = run_query(file, rq, qo);
      const auto want = scan(rows, rq, h1);
      CHECK(got.rows == want);
      if (want.empty()) CHECK(got.status == QueryStatus::Ok);
    }
  }
}

TEST_CASE("equality queries read more words with k = 2") {
  GenSpec spec;
  spec.rows = 20000;
  spec.columns = {ColumnSpec::parse("uniform:200")};
  const StringRows rows = generate_rows(spec);
  const TableProfile profile = profile_rows(rows);
  CodingOptions o;
  const IndexHeader h1 = make_header(profile, o);
  o.k = 2;
  const IndexHeader h2 = make_header(profile, o);
  const EncodedTable t = sort_encoded(encode_rows(rows, profile), profile, SortPlan::parse("lex"));
  const auto b1 = build_blocks(t, h1);
  const auto b2 = build_blocks(t, h2);
  const MemoryIndexSource s1(h1, b1), s2(h2, b2);
  uint64_t w1 = 0, w2 = 0;
  for (const auto& v : profile.columns[0].dict.values) {
    const auto r1 = equality_query(s1, 0, v);
    const auto r2 = equality_query(s2, 0, v);
    CHECK(r1.rows == r2.rows);
    w1 += r1.words_scanned;
    w2 += r2.words_scanned;
  }
  CHECK(w2 >= w1);
}
