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
// Word-span kernels used on the dirty-word paths of the EWAH operations and by
// the uncompressed in-place aggregator. Every kernel has a scalar reference
// implementation; AVX2 (x86-64) and NEON (AArch64) variants are selected at
// runtime and must produce bit-identical results.
//
// Words are stored one per uint64_t regardless of the logical word size; bits
// above the logical width are always zero on input and kept zero on output.
// -----------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace ewahidx {

enum class BitOp : uint8_t { And, Or, Xor, AndNot };

// Applies op to a single bit pair.
constexpr bool apply(BitOp op, bool a, bool b) {
  switch (op) {
    case BitOp::And: return a && b;
    case BitOp::Or: return a || b;
    case BitOp::Xor: return a != b;
    case BitOp::AndNot: return a && !b;
  }
  return false;
}

constexpr uint64_t apply(BitOp op, uint64_t a, uint64_t b) {
  switch (op) {
    case BitOp::And: return a & b;
    case BitOp::Or: return a | b;
    case BitOp::Xor: return a ^ b;
    case BitOp::AndNot: return a & ~b;
  }
  return 0;
}

namespace simd {

enum class Isa : uint8_t { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // out[i] = a[i] op b[i]. out may alias a or b.
  void (*bitwise)(BitOp op, const uint64_t* a, const uint64_t* b,
                  uint64_t* out, size_t n);
  // out[i] = ~in[i] & mask. out may alias in.
  void (*invert)(const uint64_t* in, uint64_t* out, size_t n, uint64_t mask);
  uint64_t (*popcount)(const uint64_t* words, size_t n);
  // Index of the first word equal to 0 or to full, or n if there is none.
  size_t (*find_clean)(const uint64_t* words, size_t n, uint64_t full);
  // Length of the prefix whose words all equal value.
  size_t (*run_length)(const uint64_t* words, size_t n, uint64_t value);
};

// Kernel tables for each ISA; only valid when isa_supported(isa).
const KernelTable& scalar_kernels();
const KernelTable& kernels_for(Isa isa);
bool isa_supported(Isa isa);

// The table in use. Chosen on first call from the host CPU; the environment
// variable EWAHIDX_FORCE_SCALAR=1 pins the scalar path.
const KernelTable& active();

// Overrides the active table (tests and benchmarks). Returns false and leaves
// the selection unchanged when the ISA is not supported here.
bool force_isa(Isa isa);

// Span conveniences over the active table.
inline void bitwise(BitOp op, std::span<const uint64_t> a,
                    std::span<const uint64_t> b, std::span<uint64_t> out) {
  active().bitwise(op, a.data(), b.data(), out.data(), out.size());
}
inline void invert(std::span<const uint64_t> in, std::span<uint64_t> out,
                   uint64_t mask) {
  active().invert(in.data(), out.data(), out.size(), mask);
}
inline uint64_t popcount(std::span<const uint64_t> words) {
  return active().popcount(words.data(), words.size());
}
inline size_t find_clean(std::span<const uint64_t> words, uint64_t full) {
  return active().find_clean(words.data(), words.size(), full);
}
inline size_t run_length(std::span<const uint64_t> words, uint64_t value) {
  return active().run_length(words.data(), words.size(), value);
}

}  // namespace simd
}  // namespace ewahidx
