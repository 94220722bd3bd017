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

#include <bit>

#include "ewahidx/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace ewahidx::simd::scalar {

void bitwise(BitOp op, const uint64_t* a, const uint64_t* b, uint64_t* out,
             size_t n) {
  switch (op) {
    case BitOp::And:
      for (size_t i = 0; i < n; ++i) out[i] = a[i] & b[i];
      break;
    case BitOp::Or:
      for (size_t i = 0; i < n; ++i) out[i] = a[i] | b[i];
      break;
    case BitOp::Xor:
      for (size_t i = 0; i < n; ++i) out[i] = a[i] ^ b[i];
      break;
    case BitOp::AndNot:
      for (size_t i = 0; i < n; ++i) out[i] = a[i] & ~b[i];
      break;
  }
}

void invert(const uint64_t* in, uint64_t* out, size_t n, uint64_t mask) {
  for (size_t i = 0; i < n; ++i) out[i] = ~in[i] & mask;
}

uint64_t popcount(const uint64_t* words, size_t n) {
  uint64_t total = 0;
  for (size_t i = 0; i < n; ++i) total += std::popcount(words[i]);
  return total;
}

size_t find_clean(const uint64_t* words, size_t n, uint64_t full) {
  for (size_t i = 0; i < n; ++i) {
    if (words[i] == 0 || words[i] == full) return i;
  }
  return n;
}

size_t run_length(const uint64_t* words, size_t n, uint64_t value) {
  size_t i = 0;
  while (i < n && words[i] == value) ++i;
  return i;
}

}  // namespace ewahidx::simd::scalar
