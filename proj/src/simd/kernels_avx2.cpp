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

// Compiled with -mavx2. Only reached after the dispatcher confirmed AVX2.

#include <immintrin.h>

#include <bit>

#include "kernels_impl.hpp"

namespace ewahidx::simd::avx2 {
namespace {

inline __m256i load(const uint64_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}
inline void store(uint64_t* p, __m256i v) {
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v);
}

template <typename VecOp, typename ScalarOp>
inline void bitwise_loop(const uint64_t* a, const uint64_t* b, uint64_t* out,
                         size_t n, VecOp vop, ScalarOp sop) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) store(out + i, vop(load(a + i), load(b + i)));
  for (; i < n; ++i) out[i] = sop(a[i], b[i]);
}

// Nibble-table popcount of each byte, summed into four 64-bit lanes.
inline __m256i popcount_lanes(__m256i v) {
  const __m256i table = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3,
                                         2, 3, 3, 4, 0, 1, 1, 2, 1, 2, 2, 3,
                                         1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  const __m256i bytes = _mm256_add_epi8(_mm256_shuffle_epi8(table, lo),
                                        _mm256_shuffle_epi8(table, hi));
  return _mm256_sad_epu8(bytes, _mm256_setzero_si256());
}

}  // namespace

void bitwise(BitOp op, const uint64_t* a, const uint64_t* b, uint64_t* out,
             size_t n) {
  switch (op) {
    case BitOp::And:
      bitwise_loop(
          a, b, out, n, [](__m256i x, __m256i y) { return _mm256_and_si256(x, y); },
          [](uint64_t x, uint64_t y) { return x & y; });
      break;
    case BitOp::Or:
      bitwise_loop(
          a, b, out, n, [](__m256i x, __m256i y) { return _mm256_or_si256(x, y); },
          [](uint64_t x, uint64_t y) { return x | y; });
      break;
    case BitOp::Xor:
      bitwise_loop(
          a, b, out, n, [](__m256i x, __m256i y) { return _mm256_xor_si256(x, y); },
          [](uint64_t x, uint64_t y) { return x ^ y; });
      break;
    case BitOp::AndNot:
      // _mm256_andnot_si256 computes ~first & second.
      bitwise_loop(
          a, b, out, n,
          [](__m256i x, __m256i y) { return _mm256_andnot_si256(y, x); },
          [](uint64_t x, uint64_t y) { return x & ~y; });
      break;
  }
}

void invert(const uint64_t* in, uint64_t* out, size_t n, uint64_t mask) {
  const __m256i m = _mm256_set1_epi64x(static_cast<long long>(mask));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) store(out + i, _mm256_andnot_si256(load(in + i), m));
  for (; i < n; ++i) out[i] = ~in[i] & mask;
}

uint64_t popcount(const uint64_t* words, size_t n) {
  __m256i acc = _mm256_setzero_si256();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_epi64(acc, popcount_lanes(load(words + i)));
  }
  alignas(32) uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) total += std::popcount(words[i]);
  return total;
}

size_t find_clean(const uint64_t* words, size_t n, uint64_t full) {
  const __m256i zero = _mm256_setzero_si256();
  const __m256i ones = _mm256_set1_epi64x(static_cast<long long>(full));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i v = load(words + i);
    const __m256i hit =
        _mm256_or_si256(_mm256_cmpeq_epi64(v, zero), _mm256_cmpeq_epi64(v, ones));
    const int mask = _mm256_movemask_pd(_mm256_castsi256_pd(hit));
    if (mask != 0) return i + static_cast<size_t>(std::countr_zero(unsigned(mask)));
  }
  for (; i < n; ++i) {
    if (words[i] == 0 || words[i] == full) return i;
  }
  return n;
}

size_t run_length(const uint64_t* words, size_t n, uint64_t value) {
  const __m256i v = _mm256_set1_epi64x(static_cast<long long>(value));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i eq = _mm256_cmpeq_epi64(load(words + i), v);
    const unsigned mask =
        static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(eq)));
    if (mask != 0xf) return i + static_cast<size_t>(std::countr_one(mask));
  }
  while (i < n && words[i] == value) ++i;
  return i;
}

}  // namespace ewahidx::simd::avx2
