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

// AArch64 Advanced SIMD variants. NEON is mandatory on AArch64, so no runtime
// probe is needed beyond the compile-time guard.

#include <arm_neon.h>

#include <bit>

#include "kernels_impl.hpp"

namespace ewahidx::simd::neon {

void bitwise(BitOp op, const uint64_t* a, const uint64_t* b, uint64_t* out,
             size_t n) {
  size_t i = 0;
  switch (op) {
    case BitOp::And:
      for (; i + 2 <= n; i += 2) vst1q_u64(out + i, vandq_u64(vld1q_u64(a + i), vld1q_u64(b + i)));
      for (; i < n; ++i) out[i] = a[i] & b[i];
      break;
    case BitOp::Or:
      for (; i + 2 <= n; i += 2) vst1q_u64(out + i, vorrq_u64(vld1q_u64(a + i), vld1q_u64(b + i)));
      for (; i < n; ++i) out[i] = a[i] | b[i];
      break;
    case BitOp::Xor:
      for (; i + 2 <= n; i += 2) vst1q_u64(out + i, veorq_u64(vld1q_u64(a + i), vld1q_u64(b + i)));
      for (; i < n; ++i) out[i] = a[i] ^ b[i];
      break;
    case BitOp::AndNot:
      // vbicq computes first & ~second.
      for (; i + 2 <= n; i += 2) vst1q_u64(out + i, vbicq_u64(vld1q_u64(a + i), vld1q_u64(b + i)));
      for (; i < n; ++i) out[i] = a[i] & ~b[i];
      break;
  }
}

void invert(const uint64_t* in, uint64_t* out, size_t n, uint64_t mask) {
  const uint64x2_t m = vdupq_n_u64(mask);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_u64(out + i, vbicq_u64(m, vld1q_u64(in + i)));
  for (; i < n; ++i) out[i] = ~in[i] & mask;
}

uint64_t popcount(const uint64_t* words, size_t n) {
  uint64_t total = 0;
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint8x16_t bytes = vcntq_u8(vreinterpretq_u8_u64(vld1q_u64(words + i)));
    total += vaddvq_u8(bytes);
  }
  for (; i < n; ++i) total += std::popcount(words[i]);
  return total;
}

size_t find_clean(const uint64_t* words, size_t n, uint64_t full) {
  const uint64x2_t ones = vdupq_n_u64(full);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t v = vld1q_u64(words + i);
    const uint64x2_t hit = vorrq_u64(vceqzq_u64(v), vceqq_u64(v, ones));
    if (vgetq_lane_u64(hit, 0) != 0) return i;
    if (vgetq_lane_u64(hit, 1) != 0) return i + 1;
  }
  for (; i < n; ++i) {
    if (words[i] == 0 || words[i] == full) return i;
  }
  return n;
}

size_t run_length(const uint64_t* words, size_t n, uint64_t value) {
  const uint64x2_t v = vdupq_n_u64(value);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t eq = vceqq_u64(vld1q_u64(words + i), v);
    if (vgetq_lane_u64(eq, 0) == 0) return i;
    if (vgetq_lane_u64(eq, 1) == 0) return i + 1;
  }
  while (i < n && words[i] == value) ++i;
  return i;
}

}  // namespace ewahidx::simd::neon
