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
// File: codec.hpp
// -----------------------------------------------------------------------------
//
// k-of-N encoding. Each attribute value of a column is mapped to k of the
// column's N bitmaps, so N bitmaps hold up to C(N, k) values.
//
// A code is written as the ascending, 1-based list of its bitmap positions.
// When a code is printed as a bit string, position 1 is the leftmost
// character: {3, 4} with N = 4 prints as 0011.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ewahidx {

using Code = std::vector<uint32_t>;

// C(n, k), saturating at UINT64_MAX.
uint64_t binomial(uint64_t n, uint64_t k);

// Smallest N with C(N, k) >= n. Requires k >= 1 and n >= 1.
uint32_t min_N(uint32_t k, uint64_t n);

// Caps the requested weight for low-cardinality columns: 1 below 5 values,
// at most 2 below 21 and at most 3 below 85.
uint32_t effective_k(uint32_t requested, uint64_t n);

// All k-of-N codes in ascending Gray-code order. Consecutive codes differ
// in exactly two positions. Runs in O(k C(N, k)).
std::vector<Code> enumerate_gc(uint32_t k, uint32_t N);
// The first min(limit, C(N, k)) codes of enumerate_gc(k, N).
std::vector<Code> enumerate_gc_prefix(uint32_t k, uint32_t N, uint64_t limit);

// All k-of-N codes, largest binary number first (1100, 1010, 1001, ...).
std::vector<Code> enumerate_lex(uint32_t k, uint32_t N);

// Gray-code order on sparse bit vectors given as ascending positions, in
// O(min(|a|, |b|)).
bool gc_less(std::span<const uint32_t> a, std::span<const uint32_t> b);

std::string code_to_string(const Code& code, uint32_t N);

enum class Scheme : uint8_t {
  BinaryLex = 0,
  GrayLex = 1,
  AltGrayLex = 2,
  RandLex = 3,
  GrayFrequency = 4,
};

std::string_view scheme_name(Scheme scheme);
// Accepts the CLI spellings (binary-lex, gray-lex, alt-gray-lex, rand-lex,
// gray-freq). Throws InvalidArgument otherwise.
Scheme parse_scheme(std::string_view name);

struct CodeAllocation {
  uint32_t k = 1;
  uint32_t N = 0;
  Scheme scheme = Scheme::GrayLex;
  uint64_t seed = 0;
  // codes[r] is the code of the value with dictionary rank r.
  std::vector<Code> codes;

  size_t size() const { return codes.size(); }
  const Code& code(size_t rank) const { return codes[rank]; }
  // For each bitmap (0-based), the ranks whose code contains it.
  std::vector<std::vector<uint32_t>> ranks_by_bitmap() const;
};

struct AllocateOptions {
  uint64_t seed = 0;
  // Sum of the effective weights of the columns sorted before this one.
  // AltGrayLex reverses the order when it is odd.
  uint64_t preceding_k_sum = 0;
};

// Assigns codes to the values of one column. frequencies[r] is the count of
// the value with dictionary rank r; only GrayFrequency reads the counts.
// Throws InvalidArgument if C(N, k) < frequencies.size().
//
//   BinaryLex      rank r gets the r-th smallest code as a binary number.
//   GrayLex        rank r gets the r-th code in Gray-code order.
//   AltGrayLex     GrayLex, reversed when preceding_k_sum is odd.
//   RandLex        a seeded shuffle of the GrayLex codes.
//   GrayFrequency  the r-th most frequent value (ties by rank) gets the r-th
//                  code in Gray-code order.
CodeAllocation allocate(Scheme scheme, uint32_t k, uint32_t N,
                        std::span<const uint64_t> frequencies,
                        const AllocateOptions& options = {});

struct MulticomponentCount {
  uint64_t bitmaps = 0;   // sum of the factors
  uint64_t capacity = 0;  // product of the factors
};

// Bitmap count and capacity of a multi-component index with the given
// component bases. Every factor must exceed 1.
MulticomponentCount multicomponent_bitmap_count(std::span<const uint64_t> factors);

}  // namespace ewahidx
