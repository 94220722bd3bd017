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

// Per-ISA kernel entry points. Each namespace lives in its own translation
// unit so that only that unit is compiled with the ISA's target flags.

#pragma once

#include <cstddef>
#include <cstdint>

#include "ewahidx/simd/kernels.hpp"

#define EWAHIDX_DECLARE_KERNELS(ns)                                        \
  namespace ewahidx::simd::ns {                                            \
  void bitwise(BitOp op, const uint64_t* a, const uint64_t* b,             \
               uint64_t* out, size_t n);                                   \
  void invert(const uint64_t* in, uint64_t* out, size_t n, uint64_t mask); \
  uint64_t popcount(const uint64_t* words, size_t n);                      \
  size_t find_clean(const uint64_t* words, size_t n, uint64_t full);       \
  size_t run_length(const uint64_t* words, size_t n, uint64_t value);      \
  }

EWAHIDX_DECLARE_KERNELS(scalar)

#if defined(EWAHIDX_HAVE_AVX2)
EWAHIDX_DECLARE_KERNELS(avx2)
#endif

#if defined(EWAHIDX_HAVE_NEON)
EWAHIDX_DECLARE_KERNELS(neon)
#endif

#undef EWAHIDX_DECLARE_KERNELS
