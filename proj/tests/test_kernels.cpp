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

// Every vector kernel must match the scalar reference bit for bit.

#include <random>
#include <vector>

#include "doctest.h"
#include "ewahidx/ewah.hpp"
#include "ewahidx/simd/kernels.hpp"
#include "oracle.hpp"

using namespace ewahidx;
using simd::Isa;

namespace {

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (simd::isa_supported(isa)) out.push_back(isa);
  }
  return out;
}

std::vector<uint64_t> random_words(std::mt19937_64& rng, size_t n, uint64_t mask) {
  std::vector<uint64_t> v(n);
  for (auto& x : v) {
    switch (rng() % 4) {
      case 0: x = 0; break;
      case 1: x = mask; break;
      default: x = rng() & mask; break;
    }
  }
  return v;
}

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(simd::isa_supported(Isa::Scalar));
  CHECK(simd::scalar_kernels().isa == Isa::Scalar);
  MESSAGE("active kernels: " << simd::isa_name(simd::active().isa));
}

TEST_CASE("vector kernels match scalar") {
  const auto& ref = simd::scalar_kernels();
  std::mt19937_64 rng(11);
  for (Isa isa : vector_isas()) {
    CAPTURE(simd::isa_name(isa));
    const auto& k = simd::kernels_for(isa);
    for (int iter = 0; iter < 500; ++iter) {
      const size_t n = rng() % 70;
      const uint64_t mask = std::array<uint64_t, 3>{0xffff, 0xffffffff, ~uint64_t{0}}[iter % 3];
      const auto a = random_words(rng, n, mask);
      const auto b = random_words(rng, n, mask);
      for (BitOp op : {BitOp::And, BitOp::Or, BitOp::Xor, BitOp::AndNot}) {
        std::vector<uint64_t> x(n), y(n);
        ref.bitwise(op, a.data(), b.data(), x.data(), n);
        k.bitwise(op, a.data(), b.data(), y.data(), n);
        CHECK(x == y);
      }
      std::vector<uint64_t> x(n), y(n);
      ref.invert(a.data(), x.data(), n, mask);
      k.invert(a.data(), y.data(), n, mask);
      CHECK(x == y);
      CHECK(ref.popcount(a.data(), n) == k.popcount(a.data(), n));
      CHECK(ref.find_clean(a.data(), n, mask) == k.find_clean(a.data(), n, mask));
      const uint64_t v = n > 0 ? a[0] : 0;
      CHECK(ref.run_length(a.data(), n, v) == k.run_length(a.data(), n, v));
      std::vector<uint64_t> same(n, v);
      if (n > 0) same[rng() % n] ^= 1;
      CHECK(ref.run_length(same.data(), n, v) == k.run_length(same.data(), n, v));
    }
  }
}

TEST_CASE("bitmap operations agree across kernel tables") {
  std::mt19937_64 rng(5);
  const Isa original = simd::active().isa;
  for (int iter = 0; iter < 50; ++iter) {
    const WordParams p = WordParams::of(iter % 2 ? 64 : 32);
    const auto a = ewahidx::testing::random_bits(rng, rng() % 20000);
    const auto b = ewahidx::testing::random_bits(rng, rng() % 20000);
    const auto ca = ewahidx::testing::from_bits(p, a);
    const auto cb = ewahidx::testing::from_bits(p, b);
    std::vector<std::vector<uint64_t>> results;
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (!simd::force_isa(isa)) continue;
      const auto r = binary_op(ca, cb, BitOp::Xor);
      results.emplace_back(r.words().begin(), r.words().end());
    }
    for (const auto& r : results) CHECK(r == results.front());
  }
  simd::force_isa(original);
}
