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

#pragma once

#include <cstdint>

#include "ewahidx/error.hpp"

namespace ewahidx {

// Word geometry of an EWAH stream. A marker word of width w holds, from the
// least significant bit up: 1 bit of clean fill type, w/2 bits of clean-run
// length and w/2 - 1 bits of dirty-word count.
class WordParams {
 public:
  constexpr WordParams() = default;

  // Throws InvalidArgument unless bits is 16, 32 or 64.
  static WordParams of(unsigned bits) {
    if (bits != 16 && bits != 32 && bits != 64) {
      throw InvalidArgument("unsupported word size " + std::to_string(bits) +
                            " (expected 16, 32 or 64)");
    }
    WordParams p;
    p.bits_ = bits;
    return p;
  }

  constexpr unsigned bits() const { return bits_; }
  constexpr unsigned bytes() const { return bits_ / 8; }
  constexpr unsigned clean_count_bits() const { return bits_ / 2; }
  constexpr unsigned dirty_count_bits() const { return bits_ / 2 - 1; }

  constexpr uint64_t max_clean_count() const {
    return (uint64_t{1} << clean_count_bits()) - 1;
  }
  constexpr uint64_t max_dirty_count() const {
    return (uint64_t{1} << dirty_count_bits()) - 1;
  }
  // All w low bits set.
  constexpr uint64_t full_mask() const {
    return bits_ == 64 ? ~uint64_t{0} : (uint64_t{1} << bits_) - 1;
  }

  // Marker word packing.
  constexpr uint64_t make_marker(bool fill, uint64_t clean,
                                 uint64_t dirty) const {
    return uint64_t{fill} | (clean << 1) | (dirty << (1 + clean_count_bits()));
  }
  static constexpr bool marker_fill(uint64_t m) { return (m & 1) != 0; }
  constexpr uint64_t marker_clean(uint64_t m) const {
    return (m >> 1) & max_clean_count();
  }
  constexpr uint64_t marker_dirty(uint64_t m) const {
    return (m >> (1 + clean_count_bits())) & max_dirty_count();
  }

  friend constexpr bool operator==(WordParams, WordParams) = default;

 private:
  unsigned bits_ = 32;
};

}  // namespace ewahidx
